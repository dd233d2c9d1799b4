use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniformly sampled membrane potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoltageTrace {
    /// Time of the first sample (ms).
    pub t0: f64,
    /// Sample period (ms).
    pub dt: f64,
    /// Membrane potential samples (mV).
    pub samples: Vec<f64>,
}

impl VoltageTrace {
    pub fn new(t0: f64, dt: f64, samples: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::invalid(format!("trace sample period must be positive, got {dt}")));
        }
        if !t0.is_finite() {
            return Err(Error::invalid("trace start time is not finite"));
        }
        if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::invalid(format!("trace sample {i} is not finite")));
        }
        Ok(Self { t0, dt, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_at(&self, index: usize) -> f64 {
        self.t0 + index as f64 * self.dt
    }

    /// Time of the last sample.
    pub fn end_time(&self) -> f64 {
        self.time_at(self.samples.len().saturating_sub(1))
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(|i| self.time_at(i))
    }

    /// Adds a constant offset to every sample.
    pub fn offset(&self, k: f64) -> Self {
        Self {
            t0: self.t0,
            dt: self.dt,
            samples: self.samples.iter().map(|v| v + k).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["time_ms", "v_mV"]).map_err(csv_err)?;
        for (t, v) in self.times().zip(&self.samples) {
            w.write_record([t.to_string(), v.to_string()]).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::parse("trace csv", e))?;
        Ok(())
    }

    /// Reads a `time_ms,v_mV` CSV. The grid must be uniform to within 1e-6
    /// of the sample period.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut times = Vec::new();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() < 2 {
                return Err(Error::parse("trace csv", "expected columns time_ms,v_mV"));
            }
            times.push(parse_f64(&rec[0])?);
            values.push(parse_f64(&rec[1])?);
        }
        if times.len() < 2 {
            return Err(Error::parse("trace csv", "need at least two samples"));
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        for (i, t) in times.iter().enumerate() {
            let expected = times[0] + i as f64 * dt;
            if (t - expected).abs() > 1e-6 * dt.max(1.0) {
                return Err(Error::parse(
                    "trace csv",
                    format!("non-uniform sampling at row {i} (t = {t}, expected {expected})"),
                ));
            }
        }
        Self::new(times[0], dt, values)
    }

    pub fn to_envelope(&self, metadata: BTreeMap<String, String>) -> TraceEnvelope {
        TraceEnvelope {
            kind: "voltage_trace".into(),
            t0_ms: self.t0,
            dt_ms: self.dt,
            duration_ms: self.end_time() - self.t0,
            samples_mv: self.samples.clone(),
            metadata,
        }
    }
}

/// JSON form of a [`VoltageTrace`] carrying provenance metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEnvelope {
    pub kind: String,
    pub t0_ms: f64,
    pub dt_ms: f64,
    pub duration_ms: f64,
    pub samples_mv: Vec<f64>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl TryFrom<TraceEnvelope> for VoltageTrace {
    type Error = Error;

    fn try_from(env: TraceEnvelope) -> Result<Self> {
        VoltageTrace::new(env.t0_ms, env.dt_ms, env.samples_mv)
    }
}

/// Ordered spike times within an observation window `[0, duration]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeTrain {
    times: Vec<f64>,
    duration: f64,
}

impl SpikeTrain {
    pub fn new(times: Vec<f64>, duration: f64) -> Result<Self> {
        if !(duration >= 0.0 && duration.is_finite()) {
            return Err(Error::invalid(format!("invalid spike train duration {duration}")));
        }
        for (i, &t) in times.iter().enumerate() {
            if !(0.0..=duration).contains(&t) {
                return Err(Error::invalid(format!(
                    "spike {i} at {t} ms outside [0, {duration}]"
                )));
            }
            if i > 0 && t <= times[i - 1] {
                return Err(Error::invalid(format!(
                    "spike times not strictly increasing at index {i}"
                )));
            }
        }
        Ok(Self { times, duration })
    }

    pub fn empty(duration: f64) -> Self {
        Self {
            times: Vec::new(),
            duration,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn isis(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Shifts every spike by `shift` ms, dropping spikes that leave the window.
    pub fn shifted(&self, shift: f64) -> Self {
        let times = self
            .times
            .iter()
            .map(|t| t + shift)
            .filter(|t| (0.0..=self.duration).contains(t))
            .collect();
        Self {
            times,
            duration: self.duration,
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["spike_time_ms"]).map_err(csv_err)?;
        for t in &self.times {
            w.write_record([t.to_string()]).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::parse("spike csv", e))?;
        Ok(())
    }

    /// Reads a `spike_time_ms` CSV. The CSV does not carry the window, so it
    /// is supplied by the caller.
    pub fn read_csv<R: Read>(reader: R, duration: f64) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut times = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let Some(field) = rec.get(0) else { continue };
            times.push(parse_f64(field)?);
        }
        Self::new(times, duration)
    }

    pub fn to_envelope(&self, metadata: BTreeMap<String, String>) -> TrainEnvelope {
        TrainEnvelope {
            kind: "spike_train".into(),
            duration_ms: self.duration,
            spike_times_ms: self.times.clone(),
            metadata,
        }
    }
}

/// JSON form of a [`SpikeTrain`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainEnvelope {
    pub kind: String,
    pub duration_ms: f64,
    pub spike_times_ms: Vec<f64>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl TryFrom<TrainEnvelope> for SpikeTrain {
    type Error = Error;

    fn try_from(env: TrainEnvelope) -> Result<Self> {
        SpikeTrain::new(env.spike_times_ms, env.duration_ms)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::parse("csv", e)
}

pub(crate) fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::parse("number", format!("{s:?}: {e}")))
}
