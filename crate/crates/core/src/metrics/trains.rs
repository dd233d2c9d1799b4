use super::Histogram;
use crate::error::{Error, Result};
use crate::neuron::{SpikeTrain, VoltageTrace};

fn check_width(bin_width: f64) -> Result<()> {
    if bin_width > 0.0 && bin_width.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("bin width must be positive, got {bin_width}")))
    }
}

/// One spike per maximal run of samples at or above `threshold`, timed at
/// the first sample of the run. Samples before `t = 0` are ignored.
pub fn spikes_from_trace(trace: &VoltageTrace, threshold: f64) -> SpikeTrain {
    let duration = trace.end_time().max(0.0);
    let mut times = Vec::new();
    let mut above = false;
    for (i, &v) in trace.samples.iter().enumerate() {
        let now = v >= threshold;
        if now && !above {
            let t = trace.time_at(i);
            if t >= 0.0 {
                times.push(t);
            }
        }
        above = now;
    }
    SpikeTrain::new(times, duration).expect("onsets are increasing and inside the trace")
}

/// Histogram of successive inter-spike intervals, bins starting at 0.
///
/// Trains with fewer than two spikes yield an empty histogram.
pub fn isi_histogram(train: &SpikeTrain, bin_width: f64) -> Result<Histogram> {
    check_width(bin_width)?;
    let isis = train.isis();
    let index = |isi: f64| (isi / bin_width + 1e-9).floor() as usize;
    let bins = isis.iter().map(|&x| index(x) + 1).max().unwrap_or(0);
    let mut h = Histogram::zeros(bin_width, 0.0, bins)?;
    for isi in isis {
        h.counts[index(isi)] += 1;
    }
    Ok(h)
}

/// Histogram of lags `t_b - t_a` within `±window`.
///
/// Bins are centred on multiples of `bin_width`: lag `x` falls in bin
/// `round(x / bin_width)`, and bins `-K..=K` with `K = floor(window /
/// bin_width)` are kept. When `a` and `b` hold identical spike times the
/// result is the auto-correlogram and each spike's pairing with itself is
/// left out.
pub fn correlogram(a: &SpikeTrain, b: &SpikeTrain, bin_width: f64, window: f64) -> Result<Histogram> {
    check_width(bin_width)?;
    if !(window > 0.0 && window.is_finite()) {
        return Err(Error::invalid(format!("window must be positive, got {window}")));
    }
    let k_max = (window / bin_width + 1e-9).floor() as i64;
    let start = -(k_max as f64 + 0.5) * bin_width;
    let mut h = Histogram::zeros(bin_width, start, (2 * k_max + 1) as usize)?;
    let auto = a.times() == b.times();
    let tb = b.times();
    // Lags beyond this can never land in a kept bin.
    let reach = (k_max as f64 + 0.5) * bin_width;
    let mut lo = 0;
    for (i, &ta) in a.times().iter().enumerate() {
        while lo < tb.len() && tb[lo] < ta - reach {
            lo += 1;
        }
        for (j, &t) in tb.iter().enumerate().skip(lo) {
            if t > ta + reach {
                break;
            }
            if auto && i == j {
                continue;
            }
            let k = ((t - ta) / bin_width).round() as i64;
            if k.abs() <= k_max {
                h.counts[(k + k_max) as usize] += 1;
            }
        }
    }
    Ok(h)
}

/// Spike counts in consecutive bins over `[0, duration]`. A spike exactly at
/// `duration` lands in the final bin.
pub fn firing_rate_histogram(train: &SpikeTrain, bin_width: f64) -> Result<Histogram> {
    check_width(bin_width)?;
    let bins = ((train.duration() / bin_width) - 1e-9).ceil().max(1.0) as usize;
    let mut h = Histogram::zeros(bin_width, 0.0, bins)?;
    for &t in train.times() {
        let i = ((t / bin_width + 1e-9).floor() as usize).min(bins - 1);
        h.counts[i] += 1;
    }
    Ok(h)
}
