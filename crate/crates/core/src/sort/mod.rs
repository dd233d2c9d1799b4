//! Offline spike sorting for single-channel extracellular recordings.
//!
//! The chain mirrors a classic acquisition workflow: zero-phase bandpass
//! filtering, negative-going threshold detection with a dead time,
//! trough-aligned waveform snippets, PCA plus peak/valley features, k-means
//! clustering and refractory-period validation of the resulting units. A
//! synthetic recording generator provides ground-truth data.

mod cluster;
mod detect;
mod filter;
mod pca;
mod pipeline;
mod recording;
mod synth;
mod validate;
mod waveform;

pub use cluster::{kmeans, Clustering, KMeansConfig};
pub use detect::{detect, mad_sigma, DetectConfig, Detection, Event, ThresholdSpec};
pub use filter::{bandpass, Biquad, BandpassConfig};
pub use pca::{pca_features, FeatureVector, PcaModel};
pub use pipeline::{sort_recording, SortConfig, SortOutput};
pub use recording::{RawRecording, RecordingMeta, SampleFormat, Sidecar};
pub use synth::{synthesize, template, SynthConfig, SynthRecording, TrueSpike, UnitSpec};
pub use validate::{
    best_match_accuracy, isi_violation_rate, match_events, validate_units, MatchSummary, SortedUnit,
    UnitPair, UnitReport,
};
pub use waveform::{extract_waveforms, WaveformConfig, WaveformSet, Waveform};
