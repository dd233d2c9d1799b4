use serde::{Deserialize, Serialize};

use super::{Event, RawRecording};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WaveformConfig {
    /// Window before the trough (ms).
    pub pre_ms: f64,
    /// Window after the trough (ms).
    pub post_ms: f64,
    /// Search radius for re-aligning on the local trough (ms).
    pub align_ms: f64,
}

impl Default for WaveformConfig {
    fn default() -> Self {
        Self {
            pre_ms: 0.4,
            post_ms: 1.0,
            align_ms: 0.3,
        }
    }
}

/// Fixed-length snippet around a detected event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waveform {
    pub samples: Vec<f64>,
    /// Index of the trough within `samples`.
    pub align_index: usize,
    /// Recording sample index of the trough.
    pub index: usize,
    pub time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformSet {
    pub waveforms: Vec<Waveform>,
    /// Positions (in the input event list) of the kept events.
    pub kept: Vec<usize>,
    /// Events whose window fell outside the recording.
    pub skipped: usize,
}

/// Cuts a trough-aligned snippet for each event. Events whose window would
/// leave the recording are skipped and counted.
pub fn extract_waveforms(rec: &RawRecording, events: &[Event], config: &WaveformConfig) -> WaveformSet {
    let pre = rec.samples_for(config.pre_ms);
    let post = rec.samples_for(config.post_ms);
    let radius = rec.samples_for(config.align_ms);
    let x = &rec.samples;
    let mut out = WaveformSet {
        waveforms: Vec::with_capacity(events.len()),
        kept: Vec::with_capacity(events.len()),
        skipped: 0,
    };
    for (k, ev) in events.iter().enumerate() {
        if ev.index >= x.len() {
            out.skipped += 1;
            continue;
        }
        let lo = ev.index.saturating_sub(radius);
        let hi = (ev.index + radius).min(x.len() - 1);
        let trough = (lo..=hi).fold(ev.index, |m, i| if x[i] < x[m] { i } else { m });
        if trough < pre || trough + post >= x.len() {
            out.skipped += 1;
            continue;
        }
        out.waveforms.push(Waveform {
            samples: x[trough - pre..=trough + post].to_vec(),
            align_index: pre,
            index: trough,
            time_ms: rec.time_ms(trough),
        });
        out.kept.push(k);
    }
    out
}
