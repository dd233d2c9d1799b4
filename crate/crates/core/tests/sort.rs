use izhifit::sort::{
    bandpass, best_match_accuracy, detect, isi_violation_rate, kmeans, pca_features, sort_recording, synthesize,
    validate_units, DetectConfig, KMeansConfig, PcaModel, RawRecording, SampleFormat, SortConfig, SynthConfig,
    Waveform,
};
use izhifit::SpikeTrain;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

const FS: f64 = 50_000.0;

fn sine(hz: f64, seconds: f64) -> RawRecording {
    let n = (seconds * FS) as usize;
    let x = (0..n)
        .map(|i| (2.0 * std::f64::consts::PI * hz * i as f64 / FS).sin())
        .collect();
    RawRecording::new(FS, x).unwrap()
}

/// RMS over the middle half, away from edge transients.
fn mid_rms(r: &RawRecording) -> f64 {
    let n = r.samples.len();
    let mid = &r.samples[n / 4..3 * n / 4];
    (mid.iter().map(|v| v * v).sum::<f64>() / mid.len() as f64).sqrt()
}

#[test]
fn passband_sine_keeps_its_amplitude() {
    let input = sine(5_000.0, 0.2);
    let out = bandpass(&input, 300.0, 10_000.0).unwrap();
    let gain = mid_rms(&out) / mid_rms(&input);
    assert!((gain - 1.0).abs() < 0.05, "gain {gain}");
}

#[test]
fn mains_hum_is_attenuated() {
    let input = sine(50.0, 1.0);
    let out = bandpass(&input, 300.0, 10_000.0).unwrap();
    let db = 20.0 * (mid_rms(&out) / mid_rms(&input)).log10();
    assert!(db <= -20.0, "{db} dB");
}

#[test]
fn band_edges_must_be_ordered() {
    let r = sine(1_000.0, 0.05);
    assert!(bandpass(&r, 10_000.0, 300.0).is_err());
    assert!(bandpass(&r, 300.0, 30_000.0).is_err());
}

fn random_waveforms(seed: u64, n: usize, len: usize) -> Vec<Waveform> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis: Vec<Vec<f64>> = (0..3).map(|_| (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    (0..n)
        .map(|i| {
            let c: Vec<f64> = (0..3).map(|k| rng.random_range(-5.0..5.0) / (k + 1) as f64).collect();
            let samples = (0..len)
                .map(|j| basis.iter().zip(&c).map(|(b, c)| b[j] * c).sum::<f64>() + 0.01 * rng.random::<f64>())
                .collect();
            Waveform {
                samples,
                align_index: 0,
                index: i,
                time_ms: i as f64,
            }
        })
        .collect()
}

#[test]
fn pca_components_are_orthonormal() {
    let w = random_waveforms(1, 200, 30);
    let m = PcaModel::fit(&w).unwrap();
    let gram = m.components.transpose() * &m.components;
    let err = (gram - DMatrix::identity(30, 30)).abs().max();
    assert!(err < 1e-9, "{err}");
    assert!(m.explained_variance.windows(2).all(|v| v[0] >= v[1]));
    // Three latent directions carry nearly all of the variance.
    let total: f64 = m.explained_variance.iter().sum();
    assert!(m.explained_variance[..3].iter().sum::<f64>() / total > 0.99);
}

#[test]
fn pca_round_trip_reconstructs_waveforms() {
    let w = random_waveforms(2, 100, 25);
    let m = PcaModel::fit(&w).unwrap();
    for wf in &w {
        let back = m.reconstruct(&m.project(&wf.samples));
        let num: f64 = back.iter().zip(&wf.samples).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = wf.samples.iter().zip(m.mean.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(num <= 1e-6 * den.max(1e-12), "{num} vs {den}");
    }
    let (_, f) = pca_features(&w).unwrap();
    assert_eq!(f.len(), w.len());
}

#[test]
fn kmeans_separates_gaussian_blobs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let noise = Normal::new(0.0, 0.5).unwrap();
    let centers = [[0.0, 0.0, 0.0], [10.0, 0.0, 5.0], [0.0, 10.0, -5.0]];
    let mut points = Vec::new();
    let mut truth = Vec::new();
    for i in 0..600 {
        let c = centers[i % 3];
        points.push(c.iter().map(|x| x + noise.sample(&mut rng)).collect::<Vec<f64>>());
        truth.push(i % 3);
    }
    let cfg = KMeansConfig {
        k: 3,
        seed: 9,
        ..KMeansConfig::default()
    };
    let c = kmeans(&points, &cfg).unwrap();
    assert_eq!(best_match_accuracy(&c.assignments, &truth), 1.0);
    assert_eq!(c, kmeans(&points, &cfg).unwrap());
}

#[test]
fn merged_units_are_flagged() {
    let wf = |t: f64| Waveform {
        samples: vec![0.0; 4],
        align_index: 0,
        index: 0,
        time_ms: t,
    };
    // Two regular units; the second fires 0.5 ms after the first.
    let a: Vec<f64> = (0..200).map(|i| 10.0 + 20.0 * i as f64).collect();
    let b: Vec<f64> = a.iter().map(|t| t + 0.5).collect();
    let waveforms: Vec<Waveform> = a.iter().chain(&b).map(|&t| wf(t)).collect();
    let split: Vec<usize> = (0..400).map(|i| i / 200).collect();
    let merged = vec![0; 400];

    let ok = validate_units(&split, &waveforms, 2, 5000.0, 1.0, 0.01).unwrap();
    assert!(ok.units.iter().all(|u| u.valid && u.isi_violation_rate == 0.0));
    assert_eq!(ok.cross_correlograms.len(), 1);

    let bad = validate_units(&merged, &waveforms, 2, 5000.0, 1.0, 0.01).unwrap();
    assert_eq!(bad.empty_clusters, vec![1]);
    let u = &bad.units[0];
    assert!(!u.valid && !u.flags.is_empty());
    assert!((u.isi_violation_rate - 200.0 / 399.0).abs() < 1e-12);
}

#[test]
fn noise_alone_rarely_crosses_threshold() {
    let synth = synthesize(&SynthConfig {
        duration_s: 20.0,
        units: vec![],
        seed: 12,
        ..SynthConfig::default()
    })
    .unwrap();
    assert!(synth.truth.is_empty());
    let filtered = bandpass(&synth.recording, 300.0, 10_000.0).unwrap();
    let d = detect(&filtered, &DetectConfig::default());
    let per_s = d.events.len() as f64 / 20.0;
    assert!(per_s < 0.5, "{per_s} false events per second");
}

#[test]
fn synthetic_units_respect_refractoriness() {
    let s = synthesize(&SynthConfig {
        duration_s: 10.0,
        ..SynthConfig::default()
    })
    .unwrap();
    for unit in 0..3 {
        let t: Vec<f64> = s.truth.iter().filter(|x| x.unit == unit).map(|x| x.time_ms).collect();
        let train = SpikeTrain::new(t, 10_000.0).unwrap();
        assert_eq!(isi_violation_rate(&train, 2.0 - 0.02), 0.0);
    }
    assert!(s.truth.windows(2).all(|w| w[0].time_ms <= w[1].time_ms));
}

#[test]
fn pipeline_is_deterministic_and_emits_valid_trains() {
    let cfg = SynthConfig {
        duration_s: 8.0,
        seed: 21,
        ..SynthConfig::default()
    };
    let rec = synthesize(&cfg).unwrap().recording;
    let a = sort_recording(&rec, &SortConfig::default()).unwrap();
    let b = sort_recording(&rec, &SortConfig::default()).unwrap();
    assert_eq!(a.report, b.report);
    assert_eq!(a.assignments, b.assignments);
    for u in &a.report.units {
        let t = u.train.times();
        assert!(t.windows(2).all(|w| w[0] < w[1]));
        assert!(t.iter().all(|&x| (0.0..=rec.duration_ms()).contains(&x)));
    }
}

#[test]
fn binary_round_trip() {
    let rec = synthesize(&SynthConfig {
        duration_s: 0.2,
        ..SynthConfig::default()
    })
    .unwrap()
    .recording;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.bin");
    rec.save_binary(&path, SampleFormat::F32, 1.0).unwrap();
    let back = RawRecording::load(&path).unwrap();
    assert_eq!(back.sample_rate, rec.sample_rate);
    assert!(back.samples.iter().zip(&rec.samples).all(|(a, b)| (a - b).abs() <= 1e-5 * b.abs().max(1.0)));

    rec.save_binary(&path, SampleFormat::I16, 0.1).unwrap();
    let back = RawRecording::load(&path).unwrap();
    assert!(back.samples.iter().zip(&rec.samples).all(|(a, b)| (a - b).abs() <= 0.05 + 1e-9));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn accuracy_ignores_label_names(labels in prop::collection::vec(0usize..3, 1..200), perm in Just([2usize, 0, 1])) {
        let renamed: Vec<usize> = labels.iter().map(|&l| perm[l]).collect();
        prop_assert_eq!(best_match_accuracy(&renamed, &labels), 1.0);
    }

    #[test]
    fn violation_rate_is_a_fraction(mut t in prop::collection::vec(0.0f64..1000.0, 0..100), r in 0.1f64..10.0) {
        t.sort_by(f64::total_cmp);
        t.dedup();
        let rate = isi_violation_rate(&SpikeTrain::new(t, 1000.0).unwrap(), r);
        prop_assert!((0.0..=1.0).contains(&rate));
    }
}
