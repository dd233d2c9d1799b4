//! Interspike-interval histogram, auto-correlogram and rate histogram of a
//! simulated adapting neuron.

use izhifit::metrics::{correlogram, firing_rate_histogram, isi_histogram};
use izhifit::{simulate, NeuronParams, SimConfig, StimulusProtocol};

fn bar(n: u64) -> String {
    "#".repeat(n as usize)
}

fn main() -> izhifit::Result<()> {
    let params = NeuronParams::new(0.01, 0.2, -65.0, 8.0);
    let protocol = StimulusProtocol::step(0.0, 12.0, 10.0, 1000.0)?;
    let train = simulate(&params, &protocol, &SimConfig::for_protocol(&protocol))?.spikes;
    println!("{} spikes in {} ms", train.len(), train.duration());

    let isi = isi_histogram(&train, 2.0)?;
    println!("\nISI histogram (2 ms bins, {} intervals)", isi.total());
    for (i, &c) in isi.counts.iter().enumerate().filter(|(_, c)| **c > 0) {
        println!("  {:>5.1} ms {:>3} {}", isi.bin_start(i), c, bar(c));
    }

    let acg = correlogram(&train, &train, 5.0, 100.0)?;
    println!("\nauto-correlogram (5 ms bins, +-100 ms)");
    for (i, &c) in acg.counts.iter().enumerate() {
        println!("  {:>6.1} ms {:>3} {}", acg.bin_center(i), c, bar(c));
    }

    let rate = firing_rate_histogram(&train, 100.0)?;
    println!("\nspikes per 100 ms: {:?}", rate.counts);
    Ok(())
}
