use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};

use super::{Biquad, RawRecording, RecordingMeta};
use crate::error::{Error, Result};

/// Extracellular spike shape: a Gaussian trough followed by a Gaussian
/// rebound. Widths and delays are in ms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSpec {
    pub rate_hz: f64,
    /// Trough depth in noise standard deviations.
    pub snr: f64,
    pub trough_width_ms: f64,
    /// Rebound height relative to the trough depth.
    pub rebound_ratio: f64,
    pub rebound_delay_ms: f64,
    pub rebound_width_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub sample_rate: f64,
    pub duration_s: f64,
    /// Standard deviation of the additive Gaussian noise.
    pub noise_sd: f64,
    /// Optional second-order low-pass applied to the noise before scaling
    /// it back to `noise_sd` (Hz).
    pub noise_lowpass_hz: Option<f64>,
    /// Amplitude of mains hum.
    pub hum_amplitude: f64,
    pub hum_hz: f64,
    /// Absolute refractory period of every unit (ms).
    pub refractory_ms: f64,
    pub units: Vec<UnitSpec>,
    pub region: Option<String>,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            sample_rate: 50_000.0,
            duration_s: 60.0,
            noise_sd: 10.0,
            noise_lowpass_hz: Some(20_000.0),
            hum_amplitude: 0.0,
            hum_hz: 50.0,
            refractory_ms: 2.0,
            units: vec![
                UnitSpec {
                    rate_hz: 6.0,
                    snr: 5.0,
                    trough_width_ms: 0.07,
                    rebound_ratio: 0.25,
                    rebound_delay_ms: 0.3,
                    rebound_width_ms: 0.12,
                },
                UnitSpec {
                    rate_hz: 5.0,
                    snr: 5.0,
                    trough_width_ms: 0.12,
                    rebound_ratio: 0.8,
                    rebound_delay_ms: 0.45,
                    rebound_width_ms: 0.18,
                },
                UnitSpec {
                    rate_hz: 4.0,
                    snr: 5.0,
                    trough_width_ms: 0.2,
                    rebound_ratio: 0.3,
                    rebound_delay_ms: 0.9,
                    rebound_width_ms: 0.35,
                },
            ],
            region: None,
            seed: 0,
        }
    }
}

/// Ground-truth spike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrueSpike {
    pub unit: usize,
    /// Sample index of the template trough.
    pub index: usize,
    pub time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthRecording {
    pub recording: RawRecording,
    /// Sorted by time.
    pub truth: Vec<TrueSpike>,
    /// Unit templates scaled to their amplitudes, trough at `template_offset`.
    pub templates: Vec<Vec<f64>>,
    pub template_offset: usize,
}

/// Unit-depth template sampled from -0.5 ms to +1.5 ms around the trough.
/// Returns the samples and the trough index.
pub fn template(spec: &UnitSpec, sample_rate: f64) -> (Vec<f64>, usize) {
    let dt = 1000.0 / sample_rate;
    let pre = (0.5 / dt).round() as usize;
    let post = (1.5 / dt).round() as usize;
    let g = |t: f64, mu: f64, s: f64| (-(t - mu) * (t - mu) / (2.0 * s * s)).exp();
    let raw: Vec<f64> = (0..=pre + post)
        .map(|i| {
            let t = (i as f64 - pre as f64) * dt;
            -g(t, 0.0, spec.trough_width_ms) + spec.rebound_ratio * g(t, spec.rebound_delay_ms, spec.rebound_width_ms)
        })
        .collect();
    let depth = -raw.iter().copied().fold(f64::INFINITY, f64::min);
    (raw.into_iter().map(|x| x / depth).collect(), pre)
}

fn check(config: &SynthConfig) -> Result<()> {
    if !(config.sample_rate > 0.0 && config.duration_s > 0.0 && config.noise_sd >= 0.0) {
        return Err(Error::invalid("sample rate and duration must be positive, noise non-negative"));
    }
    for (i, u) in config.units.iter().enumerate() {
        let ok = u.rate_hz > 0.0
            && u.trough_width_ms > 0.0
            && u.rebound_width_ms > 0.0
            && 1000.0 / u.rate_hz > config.refractory_ms;
        if !ok {
            return Err(Error::invalid(format!("unit {i} has invalid parameters")));
        }
    }
    Ok(())
}

/// Poisson spike trains with an absolute refractory period, rendered as
/// templates on Gaussian noise.
pub fn synthesize(config: &SynthConfig) -> Result<SynthRecording> {
    check(config)?;
    let fs = config.sample_rate;
    let n = (config.duration_s * fs).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut x: Vec<f64> = if config.noise_sd > 0.0 {
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let mut w: Vec<f64> = (0..n).map(|_| normal.sample(&mut rng)).collect();
        if let Some(fc) = config.noise_lowpass_hz {
            let lp = Biquad::lowpass(fc, fs);
            let (mut z1, mut z2) = (0.0, 0.0);
            for v in w.iter_mut() {
                let xi = *v;
                let y = lp.b[0] * xi + z1;
                z1 = lp.b[1] * xi - lp.a[0] * y + z2;
                z2 = lp.b[2] * xi - lp.a[1] * y;
                *v = y;
            }
            let sd = (w.iter().map(|v| v * v).sum::<f64>() / n.max(1) as f64).sqrt();
            if sd > 0.0 {
                w.iter_mut().for_each(|v| *v /= sd);
            }
        }
        w.into_iter().map(|v| v * config.noise_sd).collect()
    } else {
        vec![0.0; n]
    };
    if config.hum_amplitude != 0.0 {
        for (i, v) in x.iter_mut().enumerate() {
            *v += config.hum_amplitude * (2.0 * PI * config.hum_hz * i as f64 / fs).sin();
        }
    }

    let mut truth = Vec::new();
    let mut templates = Vec::new();
    let mut offset = 0;
    for (unit, spec) in config.units.iter().enumerate() {
        let (shape, pre) = template(spec, fs);
        offset = pre;
        let amp = spec.snr * config.noise_sd.max(f64::MIN_POSITIVE);
        let scaled: Vec<f64> = shape.iter().map(|s| s * amp).collect();
        let mean_isi = 1000.0 / spec.rate_hz;
        let exp = Exp::new(1.0 / (mean_isi - config.refractory_ms)).expect("positive rate");
        let mut t = rng.random::<f64>() * mean_isi;
        loop {
            let index = (t * fs / 1000.0).round() as usize;
            if index + scaled.len() >= n + pre {
                break;
            }
            if index >= pre {
                for (k, s) in scaled.iter().enumerate() {
                    x[index - pre + k] += s;
                }
                truth.push(TrueSpike {
                    unit,
                    index,
                    time_ms: index as f64 * 1000.0 / fs,
                });
            }
            t += config.refractory_ms + exp.sample(&mut rng);
        }
        templates.push(scaled);
    }
    truth.sort_by(|a, b| a.index.cmp(&b.index).then(a.unit.cmp(&b.unit)));

    let recording = RawRecording::new(fs, x)?.with_meta(RecordingMeta {
        region: config.region.clone(),
        units: "uV".into(),
    });
    Ok(SynthRecording {
        recording,
        truth,
        templates,
        template_offset: offset,
    })
}
