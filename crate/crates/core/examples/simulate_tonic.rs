//! Simulates a regular-spiking neuron under a 10 pA step and prints the
//! spike times and the first interspike intervals.

use izhifit::{simulate, NeuronParams, SimConfig, StimulusProtocol};

fn main() -> izhifit::Result<()> {
    let params = NeuronParams::new(0.02, 0.2, -65.0, 6.0);
    let protocol = StimulusProtocol::step(0.0, 10.0, 20.0, 300.0)?;
    let sim = simulate(&params, &protocol, &SimConfig::for_protocol(&protocol))?;

    println!("{} samples at dt = {} ms", sim.trace.len(), sim.trace.dt);
    println!("{} spikes", sim.spikes.len());
    for (i, t) in sim.spikes.times().iter().enumerate().take(8) {
        println!("  spike {i:>2} at {t:>7.2} ms");
    }
    let isis = sim.spikes.isis();
    if let (Some(first), Some(last)) = (isis.first(), isis.last()) {
        println!("first ISI {first:.2} ms, last ISI {last:.2} ms");
    }
    println!("final state v = {:.3}, u = {:.3}", sim.final_state.v, sim.final_state.u);
    Ok(())
}
