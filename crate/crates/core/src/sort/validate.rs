use serde::{Deserialize, Serialize};

use super::Waveform;
use crate::error::Result;
use crate::metrics::{correlogram, Histogram};
use crate::neuron::SpikeTrain;

/// A validated single unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortedUnit {
    pub id: usize,
    pub train: SpikeTrain,
    pub mean_waveform: Vec<f64>,
    /// Fraction of ISIs shorter than the refractory period.
    pub isi_violation_rate: f64,
    pub valid: bool,
    pub flags: Vec<String>,
}

/// Cross-correlogram between two units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitPair {
    pub a: usize,
    pub b: usize,
    pub correlogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitReport {
    pub units: Vec<SortedUnit>,
    /// Cluster labels that received no spikes.
    pub empty_clusters: Vec<usize>,
    pub cross_correlograms: Vec<UnitPair>,
}

/// Fraction of inter-spike intervals shorter than `refractory_ms`.
pub fn isi_violation_rate(train: &SpikeTrain, refractory_ms: f64) -> f64 {
    let isis = train.isis();
    if isis.is_empty() {
        return 0.0;
    }
    isis.iter().filter(|&&d| d < refractory_ms).count() as f64 / isis.len() as f64
}

/// Groups waveforms by cluster label into units. Units with a violation
/// rate above `max_violation_rate` are kept but marked invalid. Pairwise
/// cross-correlograms use 1 ms bins over ±50 ms.
pub fn validate_units(
    assignments: &[usize],
    waveforms: &[Waveform],
    k: usize,
    duration_ms: f64,
    refractory_ms: f64,
    max_violation_rate: f64,
) -> Result<UnitReport> {
    let mut units = Vec::new();
    let mut empty_clusters = Vec::new();
    for label in 0..k {
        let members: Vec<&Waveform> = assignments
            .iter()
            .zip(waveforms)
            .filter(|(&a, _)| a == label)
            .map(|(_, w)| w)
            .collect();
        if members.is_empty() {
            empty_clusters.push(label);
            continue;
        }
        let mut times: Vec<f64> = members.iter().map(|w| w.time_ms).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let train = SpikeTrain::new(times, duration_ms)?;
        let len = members[0].samples.len();
        let mut mean_waveform = vec![0.0; len];
        for w in &members {
            for (m, x) in mean_waveform.iter_mut().zip(&w.samples) {
                *m += x;
            }
        }
        mean_waveform.iter_mut().for_each(|m| *m /= members.len() as f64);
        let rate = isi_violation_rate(&train, refractory_ms);
        let valid = rate <= max_violation_rate;
        let flags = if valid {
            Vec::new()
        } else {
            vec![format!("refractory violations {:.2}%", 100.0 * rate)]
        };
        units.push(SortedUnit {
            id: label,
            train,
            mean_waveform,
            isi_violation_rate: rate,
            valid,
            flags,
        });
    }
    let mut cross_correlograms = Vec::new();
    for i in 0..units.len() {
        for j in i + 1..units.len() {
            cross_correlograms.push(UnitPair {
                a: units[i].id,
                b: units[j].id,
                correlogram: correlogram(&units[i].train, &units[j].train, 1.0, 50.0)?,
            });
        }
    }
    Ok(UnitReport {
        units,
        empty_clusters,
        cross_correlograms,
    })
}

/// Agreement between detected events and ground-truth spikes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchSummary {
    pub true_spikes: usize,
    pub detected: usize,
    pub matched: usize,
    pub recall: f64,
    pub precision: f64,
    /// For each matched pair: (detected index, true index).
    pub pairs: Vec<(usize, usize)>,
}

/// One-to-one matching of sorted detected times to sorted true times within
/// `tolerance_ms`, scanning both lists in time order.
pub fn match_events(detected_ms: &[f64], truth_ms: &[f64], tolerance_ms: f64) -> MatchSummary {
    let mut pairs = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < detected_ms.len() && j < truth_ms.len() {
        let d = detected_ms[i] - truth_ms[j];
        if d.abs() <= tolerance_ms {
            pairs.push((i, j));
            i += 1;
            j += 1;
        } else if d < 0.0 {
            i += 1;
        } else {
            j += 1;
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    MatchSummary {
        true_spikes: truth_ms.len(),
        detected: detected_ms.len(),
        matched: pairs.len(),
        recall: ratio(pairs.len(), truth_ms.len()),
        precision: ratio(pairs.len(), detected_ms.len()),
        pairs,
    }
}

/// Fraction of items whose predicted label maps to the true label under the
/// best one-to-one relabelling (exhaustive over label permutations).
pub fn best_match_accuracy(predicted: &[usize], truth: &[usize]) -> f64 {
    if predicted.is_empty() {
        return 0.0;
    }
    let kp = predicted.iter().max().map_or(0, |m| m + 1);
    let kt = truth.iter().max().map_or(0, |m| m + 1);
    let n = kp.max(kt);
    let mut confusion = vec![vec![0usize; n]; n];
    for (&p, &t) in predicted.iter().zip(truth) {
        confusion[p][t] += 1;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let hits: usize = (0..n).map(|i| confusion[i][p[i]]).sum();
        best = best.max(hits);
    });
    best as f64 / predicted.len() as f64
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}
