//! Fits the four model parameters to a tonic-spiking target trace with the
//! genetic algorithm. The run is short; pass a generation count to extend it.

use izhifit::catalog::{Catalog, PatternId};
use izhifit::ga::{FitProblem, GaConfig, Optimizer};
use izhifit::{simulate, SimConfig};

fn main() -> izhifit::Result<()> {
    let generations = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30);
    let cat = Catalog::builtin();
    let id = PatternId::TonicSpiking;
    let protocol = cat.protocol_for(id).clone();
    let sim = SimConfig::for_protocol(&protocol);
    let truth = cat.canonical_params(id).expect("tonic has parameters");
    let target = simulate(&truth, &protocol, &sim)?.trace;

    let config = GaConfig {
        max_generations: generations,
        ..GaConfig::default().with_seed(7)
    };
    let problem = FitProblem::new(target, protocol, sim)?;
    let result = Optimizer::new(&problem, config)
        .on_generation(|g| {
            if g.generation % 10 == 0 {
                println!("gen {:>3}  best {:>10.3}  mean {:>12.3e}", g.generation, g.best_mse, g.mean_mse);
            }
        })
        .run()?;

    let p = result.best.params;
    println!("stopped after {} generations ({:?})", result.generations_run, result.termination);
    println!("best mse {:.4}", result.best_fitness());
    println!("fitted  a={:.5} b={:.5} c={:.3} d={:.3}", p.a, p.b, p.c, p.d);
    println!("truth   a={:.5} b={:.5} c={:.3} d={:.3}", truth.a, truth.b, truth.c, truth.d);
    Ok(())
}
