use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use super::RawRecording;
use crate::error::{Error, Result};

/// Second-order section in transposed direct form II, normalised so that
/// `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn from_raw(b: [f64; 3], a0: f64, a1: f64, a2: f64) -> Self {
        Self {
            b: [b[0] / a0, b[1] / a0, b[2] / a0],
            a: [a1 / a0, a2 / a0],
        }
    }

    /// Second-order Butterworth low-pass (bilinear transform, prewarped).
    pub fn lowpass(cutoff: f64, sample_rate: f64) -> Self {
        let w0 = 2.0 * PI * cutoff / sample_rate;
        let (s, c) = w0.sin_cos();
        let alpha = s / (2.0 * FRAC_1_SQRT_2);
        let k = (1.0 - c) / 2.0;
        Self::from_raw([k, 1.0 - c, k], 1.0 + alpha, -2.0 * c, 1.0 - alpha)
    }

    /// Second-order Butterworth high-pass (bilinear transform, prewarped).
    pub fn highpass(cutoff: f64, sample_rate: f64) -> Self {
        let w0 = 2.0 * PI * cutoff / sample_rate;
        let (s, c) = w0.sin_cos();
        let alpha = s / (2.0 * FRAC_1_SQRT_2);
        let k = (1.0 + c) / 2.0;
        Self::from_raw([k, -(1.0 + c), k], 1.0 + alpha, -2.0 * c, 1.0 - alpha)
    }

    /// DC gain.
    pub fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }

    /// Magnitude response at normalised angular frequency `w` (rad/sample).
    pub fn magnitude(&self, w: f64) -> f64 {
        let (z1r, z1i) = ((-w).cos(), (-w).sin());
        let (z2r, z2i) = ((-2.0 * w).cos(), (-2.0 * w).sin());
        let nr = self.b[0] + self.b[1] * z1r + self.b[2] * z2r;
        let ni = self.b[1] * z1i + self.b[2] * z2i;
        let dr = 1.0 + self.a[0] * z1r + self.a[1] * z2r;
        let di = self.a[0] * z1i + self.a[1] * z2i;
        ((nr * nr + ni * ni) / (dr * dr + di * di)).sqrt()
    }

    /// Filters in place, starting from the steady state for a constant
    /// input equal to the first sample.
    fn run(&self, x: &mut [f64]) {
        let Some(&x0) = x.first() else { return };
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let g = if (1.0 + a1 + a2).abs() > 1e-300 { self.dc_gain() } else { 0.0 };
        let mut z1 = (g - b0) * x0;
        let mut z2 = (b2 - a2 * g) * x0;
        for v in x.iter_mut() {
            let xi = *v;
            let y = b0 * xi + z1;
            z1 = b1 * xi - a1 * y + z2;
            z2 = b2 * xi - a2 * y;
            *v = y;
        }
    }
}

/// Cascade of sections applied forward and then backward.
fn filtfilt(sections: &[Biquad], x: &[f64], pad: usize) -> Vec<f64> {
    let n = x.len();
    if n == 0 {
        return Vec::new();
    }
    let pad = pad.min(n - 1);
    let (first, last) = (x[0], x[n - 1]);
    let mut buf = Vec::with_capacity(n + 2 * pad);
    buf.extend((1..=pad).rev().map(|i| 2.0 * first - x[i]));
    buf.extend_from_slice(x);
    buf.extend((1..=pad).map(|i| 2.0 * last - x[n - 1 - i]));
    for s in sections {
        s.run(&mut buf);
    }
    buf.reverse();
    for s in sections {
        s.run(&mut buf);
    }
    buf.reverse();
    buf[pad..pad + n].to_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandpassConfig {
    pub low_hz: f64,
    pub high_hz: f64,
}

impl Default for BandpassConfig {
    fn default() -> Self {
        Self {
            low_hz: 300.0,
            high_hz: 10_000.0,
        }
    }
}

/// Zero-phase Butterworth bandpass: a second-order high-pass and a
/// second-order low-pass, each run forward and backward, so every band
/// edge rolls off at 24 dB per octave with -6 dB at the cutoff.
pub fn bandpass(rec: &RawRecording, low_hz: f64, high_hz: f64) -> Result<RawRecording> {
    let nyquist = rec.sample_rate / 2.0;
    if !(low_hz > 0.0 && low_hz < high_hz && high_hz < nyquist) {
        return Err(Error::invalid(format!(
            "invalid band [{low_hz}, {high_hz}] Hz for sample rate {} Hz",
            rec.sample_rate
        )));
    }
    let sections = [
        Biquad::highpass(low_hz, rec.sample_rate),
        Biquad::lowpass(high_hz, rec.sample_rate),
    ];
    let pad = (3.0 * rec.sample_rate / low_hz).ceil() as usize;
    Ok(RawRecording {
        sample_rate: rec.sample_rate,
        samples: filtfilt(&sections, &rec.samples, pad),
        meta: rec.meta.clone(),
    })
}
