use serde::{Deserialize, Serialize};

use crate::neuron::{Epoch, EpochKind, SpikeTrain, StimulusProtocol, VoltageTrace};

/// Thresholds used by feature extraction and by [`super::classify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    /// Spikes before this time (ms) are treated as start-up transient.
    pub transient_ms: f64,
    /// ISIs shorter than this (ms) count as burst intervals.
    pub burst_isi_ms: f64,
    /// Minimum spike count for tonic spiking.
    pub tonic_min_spikes: usize,
    /// Maximum ISI coefficient of variation for regular firing.
    pub cv_max: f64,
    /// Minimum number of leading burst ISIs for mixed mode.
    pub mixed_min_burst_isis: usize,
    /// Window after a spike searched for an after-depolarization (ms).
    pub dap_window_ms: f64,
    /// Minimum after-depolarization height (mV).
    pub dap_min_mv: f64,
    /// Spikes this long after an inhibitory epoch still count as inside it (ms).
    pub inhibition_grace_ms: f64,
    /// Response window after the end of a brief pulse (ms).
    pub pulse_window_ms: f64,
    /// Pulses closer than this (ms) form a summating pair.
    pub close_pair_ms: f64,
    /// An inhibitory pulse primes the next pulse if the gap is within this (ms).
    pub priming_gap_ms: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            transient_ms: 5.0,
            burst_isi_ms: 10.0,
            tonic_min_spikes: 5,
            cv_max: 0.2,
            mixed_min_burst_isis: 2,
            dap_window_ms: 10.0,
            dap_min_mv: 2.0,
            inhibition_grace_ms: 10.0,
            pulse_window_ms: 20.0,
            close_pair_ms: 5.0,
            priming_gap_ms: 20.0,
        }
    }
}

/// Response to one brief excitatory pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseResponse {
    pub start_ms: f64,
    pub end_ms: f64,
    pub amplitude: f64,
    /// Kind of the closest preceding non-baseline epoch.
    pub preceded_by: Option<EpochKind>,
    /// Time from the end of that epoch to the start of this pulse (ms).
    pub gap_ms: Option<f64>,
    pub spikes: usize,
}

/// Summary statistics of a response, with stable JSON field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternFeatures {
    pub spike_count: usize,
    /// From the first stimulus change to the first spike (ms).
    pub first_spike_latency_ms: Option<f64>,
    /// 0 with fewer than two spikes.
    pub mean_isi_ms: f64,
    /// Coefficient of variation of the ISIs after the first spike; 0 when
    /// fewer than two such ISIs exist.
    pub isi_cv: f64,
    /// Last ISI over the second ISI (first ISI when only one exists); 1 with
    /// fewer than two spikes.
    pub adaptation_index: f64,
    /// Fraction of ISIs shorter than the burst threshold.
    pub burst_fraction: f64,
    /// Leading ISIs shorter than the burst threshold.
    pub initial_burst_isis: usize,
    /// Coefficient of variation of the ISIs after the initial burst, when at
    /// least two such ISIs exist.
    pub tail_isi_cv: Option<f64>,
    /// First spike follows the release of an inhibitory epoch, with no
    /// spiking during inhibition.
    pub rebound: bool,
    /// Every spike falls inside an epoch of reduced drive.
    pub inhibition_spiking: bool,
    /// The protocol is a single step held to the end.
    pub sustained_stimulus: bool,
    /// Depolarizing bump after the first spike relative to the reset sample (mV).
    pub dap_amplitude_mv: Option<f64>,
    pub pulse_responses: Vec<PulseResponse>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn cv(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    if m > 0.0 {
        var.sqrt() / m
    } else {
        0.0
    }
}

/// Computes [`PatternFeatures`] for a response to `protocol`.
///
/// The voltage trace is optional; without it the after-depolarization
/// feature is left unset.
pub fn extract_features(
    train: &SpikeTrain,
    trace: Option<&VoltageTrace>,
    protocol: &StimulusProtocol,
    config: &FeatureConfig,
) -> PatternFeatures {
    let spikes: Vec<f64> = train
        .times()
        .iter()
        .copied()
        .filter(|&t| t >= config.transient_ms)
        .collect();
    let isis: Vec<f64> = spikes.windows(2).map(|w| w[1] - w[0]).collect();
    let epochs = protocol.epochs();
    let onset = epochs.get(1).map_or(0.0, |e| e.start_ms);

    let tail_isis = if isis.len() > 1 { &isis[1..] } else { &[][..] };
    let adaptation_index = match isis.len() {
        0 => 1.0,
        1 => 1.0,
        _ => isis[isis.len() - 1] / isis[1],
    };
    let burst_fraction = if isis.is_empty() {
        0.0
    } else {
        isis.iter().filter(|&&x| x < config.burst_isi_ms).count() as f64 / isis.len() as f64
    };
    let initial_burst_isis = isis.iter().take_while(|&&x| x < config.burst_isi_ms).count();

    let inhibitory: Vec<&Epoch> = epochs.iter().filter(|e| e.kind == EpochKind::Inhibitory).collect();
    let in_inhibition = |t: f64| inhibitory.iter().any(|e| e.contains(t));
    let rebound = match spikes.first() {
        Some(&first) => {
            !spikes.iter().any(|&t| in_inhibition(t))
                && inhibitory.iter().any(|e| e.end_ms <= first)
        }
        None => false,
    };
    let inhibition_spiking = spikes.iter().any(|&t| in_inhibition(t))
        && spikes.iter().all(|&t| {
            inhibitory
                .iter()
                .any(|e| t >= e.start_ms && t < e.end_ms + config.inhibition_grace_ms)
        });

    let active: Vec<&Epoch> = epochs.iter().filter(|e| e.kind != EpochKind::Baseline).collect();
    let sustained_stimulus = active.len() == 1
        && active[0].kind == EpochKind::Excitatory
        && std::ptr::eq(active[0], epochs.last().expect("protocol has epochs"));

    let dap_amplitude_mv = match (trace, spikes.first()) {
        (Some(tr), Some(&t)) => dap_amplitude(tr, t, spikes.get(1).copied(), config.dap_window_ms),
        _ => None,
    };

    let duration = protocol.duration_ms();
    let mut pulse_responses = Vec::new();
    for (idx, e) in active.iter().enumerate() {
        if e.kind != EpochKind::Excitatory || e.end_ms >= duration {
            continue;
        }
        let prev = idx.checked_sub(1).map(|i| active[i]);
        let next_start = active.get(idx + 1).map_or(f64::INFINITY, |n| n.start_ms);
        let window_end = next_start.min(e.end_ms + config.pulse_window_ms);
        pulse_responses.push(PulseResponse {
            start_ms: e.start_ms,
            end_ms: e.end_ms,
            amplitude: e.amplitude,
            preceded_by: prev.map(|p| p.kind),
            gap_ms: prev.map(|p| e.start_ms - p.end_ms),
            spikes: spikes.iter().filter(|&&t| t >= e.start_ms && t < window_end).count(),
        });
    }

    PatternFeatures {
        spike_count: spikes.len(),
        first_spike_latency_ms: spikes.first().map(|t| t - onset),
        mean_isi_ms: if isis.is_empty() { 0.0 } else { mean(&isis) },
        isi_cv: cv(tail_isis),
        adaptation_index,
        burst_fraction,
        initial_burst_isis,
        tail_isi_cv: (isis.len() >= initial_burst_isis + 2).then(|| cv(&isis[initial_burst_isis..])),
        rebound,
        inhibition_spiking,
        sustained_stimulus,
        dap_amplitude_mv,
        pulse_responses,
    }
}

/// Height of the largest sample in `(t_spike, t_spike + window]`, stopping
/// before the next spike, above the first post-spike sample.
fn dap_amplitude(trace: &VoltageTrace, t_spike: f64, next: Option<f64>, window: f64) -> Option<f64> {
    let idx = ((t_spike - trace.t0) / trace.dt).round();
    if idx < 0.0 {
        return None;
    }
    let first = idx as usize + 1;
    let reset = *trace.samples.get(first)?;
    let limit = t_spike + window + 1e-9;
    let peak = (first..trace.len())
        .map(|j| (trace.time_at(j), trace.samples[j]))
        .take_while(|&(t, _)| t <= limit && next.is_none_or(|n| t < n))
        .map(|(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    Some(peak - reset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_train_defaults() {
        let p = StimulusProtocol::step(0.0, 10.0, 10.0, 100.0).unwrap();
        let f = extract_features(&SpikeTrain::empty(100.0), None, &p, &FeatureConfig::default());
        assert_eq!(f.spike_count, 0);
        assert_eq!(f.first_spike_latency_ms, None);
        assert_eq!(f.mean_isi_ms, 0.0);
        assert_eq!(f.isi_cv, 0.0);
        assert_eq!(f.adaptation_index, 1.0);
        assert!(f.sustained_stimulus);
        assert!(!f.rebound && !f.inhibition_spiking);
    }

    #[test]
    fn transient_spikes_are_ignored() {
        let p = StimulusProtocol::step(0.0, 10.0, 10.0, 100.0).unwrap();
        let t = SpikeTrain::new(vec![1.0, 20.0, 30.0, 40.0], 100.0).unwrap();
        let f = extract_features(&t, None, &p, &FeatureConfig::default());
        assert_eq!(f.spike_count, 3);
        assert_eq!(f.first_spike_latency_ms, Some(10.0));
        assert_eq!(f.mean_isi_ms, 10.0);
    }

    #[test]
    fn rebound_and_inhibition_flags() {
        let p = StimulusProtocol::builder()
            .hold(0.0, 20.0)
            .hold(-15.0, 25.0)
            .hold(0.0, 200.0)
            .build()
            .unwrap();
        let after = SpikeTrain::new(vec![55.0], 200.0).unwrap();
        let f = extract_features(&after, None, &p, &FeatureConfig::default());
        assert!(f.rebound && !f.inhibition_spiking && !f.sustained_stimulus);
        let during = SpikeTrain::new(vec![22.0], 200.0).unwrap();
        let f = extract_features(&during, None, &p, &FeatureConfig::default());
        assert!(!f.rebound && f.inhibition_spiking);
    }

    #[test]
    fn pulse_bookkeeping() {
        let p = StimulusProtocol::builder()
            .hold(0.0, 10.0)
            .hold(1.0, 15.0)
            .hold(0.0, 70.0)
            .hold(-6.0, 75.0)
            .hold(0.0, 80.0)
            .hold(1.0, 85.0)
            .hold(0.0, 200.0)
            .build()
            .unwrap();
        let t = SpikeTrain::new(vec![92.5], 200.0).unwrap();
        let f = extract_features(&t, None, &p, &FeatureConfig::default());
        assert_eq!(f.pulse_responses.len(), 2);
        assert_eq!(f.pulse_responses[0].preceded_by, None);
        assert_eq!(f.pulse_responses[0].spikes, 0);
        assert_eq!(f.pulse_responses[1].preceded_by, Some(EpochKind::Inhibitory));
        assert_eq!(f.pulse_responses[1].gap_ms, Some(5.0));
        assert_eq!(f.pulse_responses[1].spikes, 1);
    }
}
