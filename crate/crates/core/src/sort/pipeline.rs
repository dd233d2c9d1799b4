use serde::{Deserialize, Serialize};

use super::{
    bandpass, detect, extract_waveforms, kmeans, pca_features, validate_units, BandpassConfig,
    DetectConfig, Detection, FeatureVector, KMeansConfig, RawRecording, UnitReport, WaveformConfig,
    WaveformSet,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SortConfig {
    pub filter: BandpassConfig,
    pub detect: DetectConfig,
    pub waveform: WaveformConfig,
    pub kmeans: KMeansConfig,
    pub refractory_ms: f64,
    pub max_violation_rate: f64,
}

impl Default for SortConfig {
    fn default() -> Self {
        Self {
            filter: BandpassConfig::default(),
            detect: DetectConfig::default(),
            waveform: WaveformConfig::default(),
            kmeans: KMeansConfig::default(),
            refractory_ms: 1.0,
            max_violation_rate: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SortOutput {
    pub filtered: RawRecording,
    pub detection: Detection,
    pub waveforms: WaveformSet,
    pub features: Vec<FeatureVector>,
    pub assignments: Vec<usize>,
    pub report: UnitReport,
}

/// Filter, detect, extract, project, cluster and validate.
pub fn sort_recording(rec: &RawRecording, config: &SortConfig) -> Result<SortOutput> {
    if config.refractory_ms <= 0.0 {
        return Err(Error::invalid("refractory period must be positive"));
    }
    let filtered = bandpass(rec, config.filter.low_hz, config.filter.high_hz)?;
    let detection = detect(&filtered, &config.detect);
    let waveforms = extract_waveforms(&filtered, &detection.events, &config.waveform);
    let (_, features) = pca_features(&waveforms.waveforms)?;
    let points: Vec<Vec<f64>> = features.iter().map(|f| f.to_array().to_vec()).collect();
    let clustering = kmeans(&points, &config.kmeans)?;
    let report = validate_units(
        &clustering.assignments,
        &waveforms.waveforms,
        config.kmeans.k,
        rec.duration_ms(),
        config.refractory_ms,
        config.max_violation_rate,
    )?;
    Ok(SortOutput {
        filtered,
        detection,
        waveforms,
        features,
        assignments: clustering.assignments,
        report,
    })
}
