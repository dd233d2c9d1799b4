//! Times raw single-neuron stepping.

fn main() {
    let steps: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100_000_000);
    let (secs, spikes) = izhifit::cli::bench_steps(steps);
    println!("{steps} steps in {secs:.3} s ({:.3e} steps/s, {spikes} spikes)", steps as f64 / secs);
}
