use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Descriptive channel metadata.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RecordingMeta {
    pub region: Option<String>,
    pub units: String,
}

/// Single-channel signal sampled at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecording {
    pub sample_rate: f64,
    pub samples: Vec<f64>,
    pub meta: RecordingMeta,
}

/// On-disk sample encoding for flat binary recordings (little endian).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFormat {
    I16,
    F32,
}

/// JSON file stored next to a flat binary recording.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub sample_rate: f64,
    pub format: SampleFormat,
    /// Multiplier from stored integers to signal units (i16 only).
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub units: String,
    #[serde(default)]
    pub region: Option<String>,
}

fn one() -> f64 {
    1.0
}

impl RawRecording {
    pub fn new(sample_rate: f64, samples: Vec<f64>) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::invalid(format!("sample rate must be positive, got {sample_rate}")));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("recording sample {i} is not finite")));
        }
        Ok(Self {
            sample_rate,
            samples,
            meta: RecordingMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: RecordingMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample period (ms).
    pub fn dt_ms(&self) -> f64 {
        1000.0 / self.sample_rate
    }

    pub fn duration_ms(&self) -> f64 {
        self.samples.len() as f64 * self.dt_ms()
    }

    pub fn time_ms(&self, index: usize) -> f64 {
        index as f64 * self.dt_ms()
    }

    /// Number of samples spanning `ms` milliseconds, rounded.
    pub fn samples_for(&self, ms: f64) -> usize {
        (ms * self.sample_rate / 1000.0).round() as usize
    }

    /// Sidecar path for a binary file: `x.bin` -> `x.json`.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        path.with_extension("json")
    }

    /// Loads a recording. `.csv` files hold `time_ms,signal` rows; anything
    /// else is read as flat binary described by its JSON sidecar.
    pub fn load(path: &Path) -> Result<Self> {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            let bytes = crate::io::read_bytes(path)?;
            return Self::read_csv(bytes.as_slice());
        }
        let sidecar: Sidecar = crate::io::read_json(&Self::sidecar_path(path))?;
        let bytes = crate::io::read_bytes(path)?;
        Self::from_bytes(&bytes, &sidecar)
    }

    pub fn from_bytes(bytes: &[u8], sidecar: &Sidecar) -> Result<Self> {
        let samples: Vec<f64> = match sidecar.format {
            SampleFormat::I16 => {
                if !bytes.len().is_multiple_of(2) {
                    return Err(Error::parse("i16 recording", "odd byte count"));
                }
                bytes
                    .chunks_exact(2)
                    .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 * sidecar.scale)
                    .collect()
            }
            SampleFormat::F32 => {
                if !bytes.len().is_multiple_of(4) {
                    return Err(Error::parse("f32 recording", "byte count not a multiple of 4"));
                }
                bytes
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
                    .collect()
            }
        };
        Ok(Self::new(sidecar.sample_rate, samples)?.with_meta(RecordingMeta {
            region: sidecar.region.clone(),
            units: sidecar.units.clone(),
        }))
    }

    /// Encodes the samples. For `I16`, values are divided by `scale`, rounded
    /// and saturated.
    pub fn to_bytes(&self, format: SampleFormat, scale: f64) -> Vec<u8> {
        match format {
            SampleFormat::I16 => self
                .samples
                .iter()
                .flat_map(|&x| {
                    let q = (x / scale).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16;
                    q.to_le_bytes()
                })
                .collect(),
            SampleFormat::F32 => self.samples.iter().flat_map(|&x| (x as f32).to_le_bytes()).collect(),
        }
    }

    pub fn sidecar(&self, format: SampleFormat, scale: f64) -> Sidecar {
        Sidecar {
            sample_rate: self.sample_rate,
            format,
            scale,
            units: self.meta.units.clone(),
            region: self.meta.region.clone(),
        }
    }

    /// Writes the binary file and its sidecar.
    pub fn save_binary(&self, path: &Path, format: SampleFormat, scale: f64) -> Result<()> {
        crate::io::write_atomic(path, &self.to_bytes(format, scale))?;
        crate::io::write_json(&Self::sidecar_path(path), &self.sidecar(format, scale))
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::parse("recording csv", e);
        w.write_record(["time_ms", "signal"]).map_err(err)?;
        for (i, x) in self.samples.iter().enumerate() {
            w.write_record([self.time_ms(i).to_string(), x.to_string()]).map_err(err)?;
        }
        w.flush().map_err(|e| Error::parse("recording csv", e))?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let trace = crate::neuron::VoltageTrace::read_csv(reader)?;
        Self::new(1000.0 / trace.dt, trace.samples)
    }
}
