use serde::{Deserialize, Serialize};

use super::RawRecording;

/// How the detection level is chosen. Detection is negative-going: an event
/// starts when the signal drops below `-level`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ThresholdSpec {
    /// `level = k * median(|x|) / 0.6745`.
    Auto { k: f64 },
    /// Fixed level in signal units (positive number).
    Manual { level: f64 },
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        ThresholdSpec::Auto { k: 4.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectConfig {
    pub threshold: ThresholdSpec,
    /// Minimum spacing between reported troughs (ms).
    pub dead_time_ms: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            threshold: ThresholdSpec::default(),
            dead_time_ms: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    /// Sample index of the trough.
    pub index: usize,
    pub time_ms: f64,
    /// Signal value at the trough.
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    /// Positive detection level; events cross `-level`.
    pub level: f64,
    pub events: Vec<Event>,
}

/// Robust noise estimate `median(|x|) / 0.6745`.
pub fn mad_sigma(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let mut abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let mid = abs.len() / 2;
    let (_, m, _) = abs.select_nth_unstable_by(mid, f64::total_cmp);
    *m / 0.6745
}

/// One event per excursion below `-level`, placed at the excursion's
/// trough. A trough within the dead time of the previous event is merged
/// into it, keeping the deeper of the two.
pub fn detect(rec: &RawRecording, config: &DetectConfig) -> Detection {
    let level = match config.threshold {
        ThresholdSpec::Auto { k } => k * mad_sigma(&rec.samples),
        ThresholdSpec::Manual { level } => level.abs(),
    };
    let dead = rec.samples_for(config.dead_time_ms);
    let x = &rec.samples;
    let mut events: Vec<Event> = Vec::new();
    let mut i = 0;
    while i < x.len() {
        if x[i] >= -level || level <= 0.0 {
            i += 1;
            continue;
        }
        let mut trough = i;
        while i < x.len() && x[i] < -level {
            if x[i] < x[trough] {
                trough = i;
            }
            i += 1;
        }
        let ev = Event {
            index: trough,
            time_ms: rec.time_ms(trough),
            amplitude: x[trough],
        };
        match events.last_mut() {
            Some(prev) if trough - prev.index < dead => {
                if ev.amplitude < prev.amplitude {
                    *prev = ev;
                }
            }
            _ => events.push(ev),
        }
    }
    Detection { level, events }
}
