//! Simulates every catalogued parameter set under its protocol and runs the
//! feature extractor and classifier on the result.

use izhifit::catalog::Catalog;
use izhifit::metrics::{classify_label, extract_features, FeatureConfig};
use izhifit::{simulate, SimConfig};

fn main() -> izhifit::Result<()> {
    let cat = Catalog::builtin();
    let cfg = FeatureConfig::default();
    for id in cat.fitted_patterns() {
        let protocol = cat.protocol_for(id);
        let sim_cfg = SimConfig::for_protocol(protocol);
        for (set, params) in [("original", cat.canonical_params(id)), ("optimized", cat.optimized_params(id))] {
            let Some(params) = params else { continue };
            let sim = simulate(&params, protocol, &sim_cfg)?;
            let f = extract_features(&sim.spikes, Some(&sim.trace), protocol, &cfg);
            println!(
                "{:<28} {:<9} spikes {:>3}  cv {:>5}  -> {}",
                id.as_str(),
                set,
                f.spike_count,
                format!("{:.2}", f.isi_cv),
                classify_label(&f, &cfg)
            );
        }
    }
    Ok(())
}
