use super::features::{FeatureConfig, PatternFeatures, PulseResponse};
use crate::catalog::PatternId;
use crate::neuron::EpochKind;

/// Label used for responses that match no rule.
pub const UNCLASSIFIED: &str = "unclassified";

/// Rule cascade over [`PatternFeatures`]. Rules are tried in this order and
/// the first match wins:
///
/// 1. no spikes: unclassified
/// 2. threshold variability: an isolated pulse is subthreshold, while an
///    equal pulse shortly after an inhibitory pulse fires
/// 3. integrator: of two equal pulses, the close pair fires and the
///    widely spaced pair does not
/// 4. inhibition-induced spiking: all spikes fall in reduced-drive epochs
/// 5. rebound spike: the first spike follows release from inhibition
/// 6. DAP: one spike after a brief pulse, followed by a depolarizing bump
/// 7. phasic spiking: one spike under a sustained step
/// 8. mixed mode: an initial burst and a regular tail under a sustained step
/// 9. tonic spiking: regular spiking under a sustained step
pub fn classify(f: &PatternFeatures, config: &FeatureConfig) -> Option<PatternId> {
    if f.spike_count == 0 {
        return None;
    }
    if threshold_variability(&f.pulse_responses, config) {
        return Some(PatternId::ThresholdVariability);
    }
    if integrator(&f.pulse_responses, config) {
        return Some(PatternId::Integrator);
    }
    if f.inhibition_spiking {
        return Some(PatternId::InhibitionInducedSpiking);
    }
    if f.rebound {
        return Some(PatternId::ReboundSpike);
    }
    if f.spike_count == 1
        && !f.sustained_stimulus
        && f.dap_amplitude_mv.is_some_and(|h| h >= config.dap_min_mv)
    {
        return Some(PatternId::Dap);
    }
    if !f.sustained_stimulus {
        return None;
    }
    if f.spike_count == 1 {
        return Some(PatternId::PhasicSpiking);
    }
    if f.initial_burst_isis >= config.mixed_min_burst_isis && f.burst_fraction < 1.0 {
        let tail = f.spike_count - 1 - f.initial_burst_isis;
        if tail >= 2 && f.tail_isi_cv.is_some_and(|cv| cv < config.cv_max) {
            return Some(PatternId::MixedMode);
        }
    }
    if f.spike_count >= config.tonic_min_spikes && f.isi_cv < config.cv_max {
        return Some(PatternId::TonicSpiking);
    }
    None
}

/// [`classify`] rendered as a stable string.
pub fn classify_label(f: &PatternFeatures, config: &FeatureConfig) -> &'static str {
    classify(f, config).map_or(UNCLASSIFIED, |p| p.as_str())
}

fn threshold_variability(pulses: &[PulseResponse], config: &FeatureConfig) -> bool {
    let primed = |p: &PulseResponse| {
        p.preceded_by == Some(EpochKind::Inhibitory)
            && p.gap_ms.is_some_and(|g| g <= config.priming_gap_ms)
    };
    pulses.iter().any(|plain| {
        !primed(plain)
            && plain.preceded_by != Some(EpochKind::Inhibitory)
            && plain.spikes == 0
            && pulses
                .iter()
                .any(|q| primed(q) && q.amplitude == plain.amplitude && q.spikes > 0)
    })
}

fn integrator(pulses: &[PulseResponse], config: &FeatureConfig) -> bool {
    let pairs: Vec<(&PulseResponse, &PulseResponse, f64)> = pulses
        .windows(2)
        .filter(|w| {
            w[0].amplitude == w[1].amplitude && w[1].preceded_by == Some(EpochKind::Excitatory)
        })
        .filter_map(|w| Some((&w[0], &w[1], w[1].gap_ms?)))
        .collect();
    let close = pairs
        .iter()
        .any(|&(a, b, gap)| gap <= config.close_pair_ms && a.spikes == 0 && b.spikes > 0);
    let far = pairs
        .iter()
        .any(|&(a, b, gap)| gap > config.close_pair_ms && a.spikes == 0 && b.spikes == 0);
    close && far
}
