use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_izhifit"))
}

fn run(args: &[&str]) -> std::process::Output {
    bin().args(args).output().unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn reproducible(args: &[&str]) {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let mut full = vec!["--quiet", "--out", dir.to_str().unwrap()];
        full.extend_from_slice(args);
        let out = run(&full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let (fa, fb) = (files(&a), files(&b));
    assert!(!fa.is_empty());
    assert_eq!(fa, fb, "{args:?}");
}

#[test]
fn seeded_commands_are_byte_reproducible() {
    reproducible(&["--seed", "5", "fit", "--pattern", "tonic_spiking", "--generations", "4", "--population", "16"]);
    reproducible(&["--seed", "5", "synth", "recording", "--duration-s", "2"]);
    reproducible(&["--seed", "5", "synth", "target", "--pattern", "dap"]);
    reproducible(&["--seed", "5", "compare", "--pattern", "mixed_mode", "--svg"]);
    reproducible(&["simulate", "--pattern", "integrator", "--optimized"]);
    let quick = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/quick_fit.json");
    reproducible(&["--config", quick, "fit", "--pattern", "phasic_spiking"]);
}

#[test]
fn sort_reads_what_synth_writes() {
    let tmp = tempfile::tempdir().unwrap();
    let rec = tmp.path().join("rec");
    let out = run(&["--quiet", "--seed", "2", "--out", rec.to_str().unwrap(), "synth", "recording", "--duration-s", "3", "--format", "i16"]);
    assert!(out.status.success());
    let sorted = tmp.path().join("sorted");
    let input = rec.join("recording.bin");
    let out = run(&["--quiet", "--out", sorted.to_str().unwrap(), "sort", "--input", input.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(sorted.join("units.json")).unwrap()).unwrap();
    assert_eq!(summary["units"].as_array().unwrap().len(), 3);
    assert!(sorted.join("unit_0.csv").exists());
}

#[test]
fn failures_leave_no_output_and_map_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("never");
    let o = out_dir.to_str().unwrap();

    let invalid = run(&["--out", o, "fit", "--pattern", "tonic_spiking", "--population", "1"]);
    assert_eq!(invalid.status.code(), Some(2));
    let usage = run(&["--out", o, "simulate", "--pattern", "no_such_pattern"]);
    assert_eq!(usage.status.code(), Some(2));
    let uncovered = run(&["--out", o, "compare", "--pattern", "bistability"]);
    assert_eq!(uncovered.status.code(), Some(2));
    let missing = run(&["--out", o, "sort", "--input", "/definitely/not/here.bin"]);
    assert_eq!(missing.status.code(), Some(4));
    let diverging = run(&["--out", o, "simulate", "--params", "-0.1,0.4,-40,-25", "--step", "10,10,200"]);
    assert_eq!(diverging.status.code(), Some(3));

    assert!(!out_dir.exists(), "failed commands created {}", out_dir.display());
}

#[test]
fn bad_config_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"version": 1, "nonsense": 3}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "catalog"]);
    assert_eq!(o.status.code(), Some(2));
    let shipped = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/default.json");
    let o = run(&["--config", shipped, "catalog", "params"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("pattern,set,a,b,c,d"));
}

#[test]
fn classify_reports_the_pattern() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path().to_str().unwrap();
    assert!(run(&["--quiet", "--out", o, "simulate", "--pattern", "rebound_spike"]).status.success());
    let trace = tmp.path().join("trace.csv");
    let out = run(&["--out", o, "classify", "--trace", trace.to_str().unwrap(), "--pattern", "rebound_spike"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "rebound_spike");
    let spikes = tmp.path().join("spikes.csv");
    let out = run(&["--out", o, "classify", "--spikes", spikes.to_str().unwrap(), "--pattern", "rebound_spike"]);
    assert!(out.status.success());
}
