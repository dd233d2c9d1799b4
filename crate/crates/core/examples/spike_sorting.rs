//! Synthesizes a three-unit extracellular recording, sorts it and scores the
//! result against the known spike times.

use izhifit::sort::{best_match_accuracy, match_events, sort_recording, synthesize, SortConfig, SynthConfig};

fn main() -> izhifit::Result<()> {
    let synth = synthesize(&SynthConfig {
        duration_s: 20.0,
        seed: 3,
        ..SynthConfig::default()
    })?;
    let out = sort_recording(&synth.recording, &SortConfig::default())?;

    let detected: Vec<f64> = out.detection.events.iter().map(|e| e.time_ms).collect();
    let truth: Vec<f64> = synth.truth.iter().map(|s| s.time_ms).collect();
    let m = match_events(&detected, &truth, 0.5);
    println!(
        "threshold {:.2}, {} events, recall {:.3}, precision {:.3}",
        out.detection.level, m.detected, m.recall, m.precision
    );

    // Cluster labels of waveforms whose event matched a true spike.
    let by_event: std::collections::HashMap<usize, usize> =
        out.waveforms.waveforms.iter().zip(&out.assignments).map(|(w, &a)| (w.index, a)).collect();
    let (mut pred, mut lab) = (Vec::new(), Vec::new());
    for &(d, t) in &m.pairs {
        if let Some(&a) = by_event.get(&out.detection.events[d].index) {
            pred.push(a);
            lab.push(synth.truth[t].unit);
        }
    }
    println!("clustering accuracy {:.3}", best_match_accuracy(&pred, &lab));
    for u in &out.report.units {
        println!(
            "unit {}: {:>4} spikes, ISI violations {:.4}, valid {}",
            u.id,
            u.train.len(),
            u.isi_violation_rate,
            u.valid
        );
    }
    Ok(())
}
