use crate::error::{Error, Result};
use crate::neuron::VoltageTrace;

const GRID_EPS: f64 = 1e-9;

/// Linear interpolation of `trace` onto a grid of period `target_dt`
/// starting at the trace's first sample and ending at or before its last.
pub fn resample(trace: &VoltageTrace, target_dt: f64) -> Result<VoltageTrace> {
    if trace.is_empty() {
        return Err(Error::invalid("cannot resample an empty trace"));
    }
    if !(target_dt > 0.0 && target_dt.is_finite()) {
        return Err(Error::invalid(format!("target dt must be positive, got {target_dt}")));
    }
    if target_dt == trace.dt {
        return Ok(trace.clone());
    }
    resample_span(trace, trace.t0, trace.end_time(), target_dt)
}

fn resample_span(trace: &VoltageTrace, start: f64, end: f64, dt: f64) -> Result<VoltageTrace> {
    if end < start - GRID_EPS {
        return Err(Error::invalid("traces do not overlap in time"));
    }
    let n = ((end - start) / dt + GRID_EPS).floor() as usize + 1;
    let last = trace.len() - 1;
    let samples = (0..n)
        .map(|j| {
            let t = start + j as f64 * dt;
            let mut pos = (t - trace.t0) / trace.dt;
            if (pos - pos.round()).abs() < GRID_EPS {
                pos = pos.round();
            }
            let pos = pos.clamp(0.0, last as f64);
            let i = (pos.floor() as usize).min(last);
            let frac = pos - i as f64;
            if frac == 0.0 || i == last {
                trace.samples[i]
            } else {
                trace.samples[i] + frac * (trace.samples[i + 1] - trace.samples[i])
            }
        })
        .collect();
    VoltageTrace::new(start, dt, samples)
}

/// Brings two traces onto the coarser of their grids over their common
/// time span.
pub fn align(a: &VoltageTrace, b: &VoltageTrace) -> Result<(VoltageTrace, VoltageTrace)> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("cannot align an empty trace"));
    }
    let dt = a.dt.max(b.dt);
    let start = a.t0.max(b.t0);
    let end = a.end_time().min(b.end_time());
    if end < start - GRID_EPS {
        return Err(Error::invalid(format!(
            "traces do not overlap ([{}, {}] vs [{}, {}] ms)",
            a.t0,
            a.end_time(),
            b.t0,
            b.end_time()
        )));
    }
    let same_grid = |t: &VoltageTrace| t.dt == dt && t.t0 == start && t.end_time() <= end + GRID_EPS;
    let ra = if same_grid(a) { a.clone() } else { resample_span(a, start, end, dt)? };
    let rb = if same_grid(b) { b.clone() } else { resample_span(b, start, end, dt)? };
    let n = ra.len().min(rb.len());
    Ok((truncate(ra, n), truncate(rb, n)))
}

fn truncate(mut t: VoltageTrace, n: usize) -> VoltageTrace {
    t.samples.truncate(n);
    t
}

/// Mean squared sample difference (mV^2). Both traces must share the same
/// sample period and length; use [`align`] first otherwise.
pub fn trace_mse(a: &VoltageTrace, b: &VoltageTrace) -> Result<f64> {
    if (a.dt - b.dt).abs() > GRID_EPS * a.dt.max(b.dt) {
        return Err(Error::invalid(format!("sample periods differ ({} vs {} ms)", a.dt, b.dt)));
    }
    if a.len() != b.len() {
        return Err(Error::invalid(format!("trace lengths differ ({} vs {})", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::invalid("cannot compare empty traces"));
    }
    let sum: f64 = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.len() as f64)
}
