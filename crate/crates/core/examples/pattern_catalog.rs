//! Walks the built-in pattern catalog: parameter sets, protocols and the
//! region possibility table.

use izhifit::catalog::{Catalog, Region};

fn main() {
    let cat = Catalog::builtin();
    println!("{:<28} {:>38} {:>44}", "pattern", "original (a, b, c, d)", "optimized (a, b, c, d)");
    for id in cat.fitted_patterns() {
        let fmt = |p: Option<izhifit::NeuronParams>| {
            p.map_or("-".to_string(), |p| format!("({}, {}, {}, {})", p.a, p.b, p.c, p.d))
        };
        println!(
            "{:<28} {:>38} {:>44}",
            id.as_str(),
            fmt(cat.canonical_params(id)),
            fmt(cat.optimized_params(id))
        );
    }

    for region in Region::ALL {
        let names: Vec<_> = cat.possible_patterns(region).map(|p| p.as_str()).collect();
        println!("\n{} ({} patterns): {}", region.as_str(), names.len(), names.join(", "));
    }

    let id = "dap".parse().expect("known pattern");
    let protocol = cat.protocol_for(id);
    println!("\nprotocol for {id}: {} ms", protocol.duration_ms());
    for e in protocol.epochs() {
        println!("  {:>6.1}..{:>6.1} ms  {:>6.1} pA  {:?}", e.start_ms, e.end_ms, e.amplitude, e.kind);
    }
}
