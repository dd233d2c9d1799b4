//! Builds a comparison between a noisy target and the original and improved
//! model, writing the overlay as CSV and SVG into a temporary directory.

use izhifit::catalog::{Catalog, PatternId};
use izhifit::report::compare_report;
use izhifit::{simulate, SimConfig, VoltageTrace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> izhifit::Result<()> {
    let id = PatternId::MixedMode;
    let cat = Catalog::builtin();
    let protocol = cat.protocol_for(id);
    let improved = cat.optimized_params(id).expect("mixed mode is fitted");
    let clean = simulate(&improved, protocol, &SimConfig::for_protocol(protocol))?.trace;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = Normal::new(0.0, 0.5).unwrap();
    let samples = clean.samples.iter().map(|v| v + noise.sample(&mut rng)).collect();
    let target = VoltageTrace::new(clean.t0, clean.dt, samples)?;

    let report = compare_report(&target, id)?;
    let s = &report.summary;
    println!("mse target vs original  {:>9.3}", s.mse_target_original);
    println!("mse target vs improved  {:>9.3}", s.mse_target_improved);
    println!("mse original vs improved {:>8.3}", s.mse_original_improved);

    let dir = std::env::temp_dir().join("izhifit-compare");
    std::fs::create_dir_all(&dir).map_err(|e| izhifit::Error::Io { path: dir.clone(), source: e })?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    izhifit::io::write_atomic(&dir.join("compare.csv"), &csv)?;
    izhifit::io::write_atomic(&dir.join("compare.svg"), report.to_svg().as_bytes())?;
    println!("wrote {}", dir.display());
    Ok(())
}
