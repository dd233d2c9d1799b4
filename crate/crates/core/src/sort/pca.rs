use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::Waveform;
use crate::error::{Error, Result};

/// Per-waveform features used for clustering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub pc1: f64,
    pub pc2: f64,
    pub pc3: f64,
    /// Largest sample.
    pub peak: f64,
    /// Smallest sample.
    pub valley: f64,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; 5] {
        [self.pc1, self.pc2, self.pc3, self.peak, self.valley]
    }
}

/// Principal axes of a set of equal-length waveforms.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: DVector<f64>,
    /// Unit-norm components as columns, by decreasing variance.
    pub components: DMatrix<f64>,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    /// Eigen-decomposition of the sample covariance of `waveforms`.
    pub fn fit(waveforms: &[Waveform]) -> Result<Self> {
        if waveforms.len() < 4 {
            return Err(Error::invalid(format!(
                "PCA needs at least 4 waveforms, got {}",
                waveforms.len()
            )));
        }
        let p = waveforms[0].samples.len();
        if p == 0 || waveforms.iter().any(|w| w.samples.len() != p) {
            return Err(Error::invalid("waveforms differ in length"));
        }
        let n = waveforms.len();
        let data = DMatrix::from_fn(n, p, |i, j| waveforms[i].samples[j]);
        let mean = DVector::from_fn(p, |j, _| data.column(j).mean());
        let mut centered = data;
        for mut row in centered.row_iter_mut() {
            row -= mean.transpose();
        }
        let cov = centered.tr_mul(&centered) / (n as f64 - 1.0);
        let eig = SymmetricEigen::new(cov);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
        let mut components = DMatrix::zeros(p, p);
        for (dst, &src) in order.iter().enumerate() {
            let mut v = eig.eigenvectors.column(src).clone_owned();
            // Sign convention: largest-magnitude entry positive.
            let imax = v.iamax();
            if v[imax] < 0.0 {
                v.neg_mut();
            }
            components.set_column(dst, &v);
        }
        let explained_variance = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
        Ok(Self {
            mean,
            components,
            explained_variance,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Scores of `samples` on every component.
    pub fn project(&self, samples: &[f64]) -> DVector<f64> {
        let x = DVector::from_column_slice(samples) - &self.mean;
        self.components.tr_mul(&x)
    }

    /// Inverse of [`PcaModel::project`] (exact when all scores are given).
    pub fn reconstruct(&self, scores: &DVector<f64>) -> DVector<f64> {
        let k = scores.len();
        self.components.columns(0, k) * scores + &self.mean
    }
}

/// Fits PCA to the waveforms and returns the model with one feature vector
/// per waveform.
pub fn pca_features(waveforms: &[Waveform]) -> Result<(PcaModel, Vec<FeatureVector>)> {
    let model = PcaModel::fit(waveforms)?;
    let score = |s: &DVector<f64>, i: usize| if i < s.len() { s[i] } else { 0.0 };
    let features = waveforms
        .iter()
        .map(|w| {
            let s = model.project(&w.samples);
            FeatureVector {
                pc1: score(&s, 0),
                pc2: score(&s, 1),
                pc3: score(&s, 2),
                peak: w.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                valley: w.samples.iter().copied().fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    Ok((model, features))
}
