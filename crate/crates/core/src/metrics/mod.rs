//! Trace comparison, spike-train statistics and firing-pattern
//! classification.

mod classify;
mod compare;
mod features;
mod histogram;
mod trains;

pub use classify::{classify, classify_label, UNCLASSIFIED};
pub use compare::{align, resample, trace_mse};
pub use features::{extract_features, FeatureConfig, PatternFeatures, PulseResponse};
pub use histogram::Histogram;
pub use trains::{correlogram, firing_rate_histogram, isi_histogram, spikes_from_trace};
