//! Target / original / improved comparison reports.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, PatternId};
use crate::error::{Error, Result};
use crate::metrics::{align, spikes_from_trace, trace_mse};
use crate::neuron::{simulate, SimConfig, SpikeTrain, VoltageTrace};

/// Threshold used to recover spike times from a target trace (mV).
pub const TARGET_SPIKE_THRESHOLD: f64 = 0.0;

/// Spike-time agreement between a model trace and the target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeComparison {
    pub target_count: usize,
    pub model_count: usize,
    /// `model - target` for spikes paired in order.
    pub deltas_ms: Vec<f64>,
    pub max_abs_delta_ms: Option<f64>,
}

impl SpikeComparison {
    pub fn new(target: &SpikeTrain, model: &SpikeTrain) -> Self {
        let deltas_ms: Vec<f64> = model
            .times()
            .iter()
            .zip(target.times())
            .map(|(m, t)| m - t)
            .collect();
        let max_abs_delta_ms = deltas_ms.iter().map(|d| d.abs()).reduce(f64::max);
        Self {
            target_count: target.len(),
            model_count: model.len(),
            deltas_ms,
            max_abs_delta_ms,
        }
    }

    /// Same spike count and every paired spike within `tolerance_ms`.
    pub fn agrees_within(&self, tolerance_ms: f64) -> bool {
        self.target_count == self.model_count
            && self.max_abs_delta_ms.is_none_or(|d| d <= tolerance_ms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub pattern: PatternId,
    pub dt_ms: f64,
    pub samples: usize,
    pub mse_target_original: f64,
    pub mse_target_improved: f64,
    pub mse_original_improved: f64,
    pub spikes_original: SpikeComparison,
    pub spikes_improved: SpikeComparison,
}

/// Three traces on a shared grid plus their pairwise statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub target: VoltageTrace,
    pub original: VoltageTrace,
    pub improved: VoltageTrace,
    pub summary: CompareSummary,
}

/// Simulates the reference and optimized parameter sets of `pattern` under
/// its catalog protocol and compares both against `target`.
pub fn compare_report(target: &VoltageTrace, pattern: PatternId) -> Result<CompareReport> {
    compare_report_with(Catalog::builtin(), target, pattern)
}

pub fn compare_report_with(catalog: &Catalog, target: &VoltageTrace, pattern: PatternId) -> Result<CompareReport> {
    let spec = catalog.spec(pattern);
    let (Some(original), Some(optimized)) = (spec.original, spec.optimized) else {
        let covered: Vec<&str> = catalog.fitted_patterns().iter().map(|p| p.as_str()).collect();
        return Err(Error::invalid(format!(
            "pattern {pattern} has no parameter sets; covered patterns: {}",
            covered.join(", ")
        )));
    };
    let sim = SimConfig::for_protocol(&spec.protocol);
    let orig = simulate(&original, &spec.protocol, &sim)?.trace;
    let imp = simulate(&optimized, &spec.protocol, &sim)?.trace;
    let (t, o) = align(target, &orig)?;
    let (t, i) = align(&t, &imp)?;
    let n = t.len().min(o.len()).min(i.len());
    let cut = |mut x: VoltageTrace| {
        x.samples.truncate(n);
        x
    };
    let (t, o, i) = (cut(t), cut(o), cut(i));

    let spikes = |x: &VoltageTrace| spikes_from_trace(x, TARGET_SPIKE_THRESHOLD);
    let (st, so, si) = (spikes(&t), spikes(&o), spikes(&i));
    let summary = CompareSummary {
        pattern,
        dt_ms: t.dt,
        samples: n,
        mse_target_original: trace_mse(&t, &o)?,
        mse_target_improved: trace_mse(&t, &i)?,
        mse_original_improved: trace_mse(&o, &i)?,
        spikes_original: SpikeComparison::new(&st, &so),
        spikes_improved: SpikeComparison::new(&st, &si),
    };
    Ok(CompareReport {
        target: t,
        original: o,
        improved: i,
        summary,
    })
}

impl CompareReport {
    /// Columns `time_ms,target_mV,original_mV,improved_mV`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::parse("compare csv", e);
        w.write_record(["time_ms", "target_mV", "original_mV", "improved_mV"]).map_err(err)?;
        for k in 0..self.target.len() {
            w.write_record([
                self.target.time_at(k).to_string(),
                self.target.samples[k].to_string(),
                self.original.samples[k].to_string(),
                self.improved.samples[k].to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::parse("compare csv", e))?;
        Ok(())
    }

    /// Line plot: target red solid, original black dashed, improved blue
    /// dash-dot.
    pub fn to_svg(&self) -> String {
        let (w, h) = (960.0, 420.0);
        let (left, right, top, bottom) = (70.0, 20.0, 40.0, 50.0);
        let pw = w - left - right;
        let ph = h - top - bottom;
        let t0 = self.target.t0;
        let t1 = self.target.end_time().max(t0 + self.target.dt);
        let all = self
            .target
            .samples
            .iter()
            .chain(&self.original.samples)
            .chain(&self.improved.samples);
        let (mut vmin, mut vmax) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if vmax - vmin < 1e-9 {
            vmin -= 1.0;
            vmax += 1.0;
        }
        let pad = 0.05 * (vmax - vmin);
        let (vmin, vmax) = (vmin - pad, vmax + pad);
        let x = |t: f64| left + (t - t0) / (t1 - t0) * pw;
        let y = |v: f64| top + (vmax - v) / (vmax - vmin) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            w / 2.0,
            self.summary.pattern.label()
        );
        let _ = writeln!(
            s,
            r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="gray"/>"#
        );
        for k in 0..=5 {
            let t = t0 + (t1 - t0) * k as f64 / 5.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.0}</text>"#,
                x(t),
                top + ph + 18.0,
                t
            );
            let v = vmin + (vmax - vmin) * k as f64 / 5.0;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.0}</text>"#,
                left - 6.0,
                y(v) + 4.0,
                v
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">time (ms)</text>"#,
            left + pw / 2.0,
            h - 12.0
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">v (mV)</text>"#,
            top + ph / 2.0,
            top + ph / 2.0
        );
        let lines = [
            (&self.target, "target", "#d62728", ""),
            (&self.original, "original", "#000000", r#" stroke-dasharray="6,4""#),
            (&self.improved, "improved", "#1f4fd6", r#" stroke-dasharray="8,3,2,3""#),
        ];
        for (k, (trace, name, color, dash)) in lines.iter().enumerate() {
            let mut pts = String::new();
            for (i, v) in trace.samples.iter().enumerate() {
                let _ = write!(pts, "{:.2},{:.2} ", x(trace.time_at(i)), y(*v));
            }
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.3"{dash} points="{}"/>"#,
                pts.trim_end()
            );
            let ly = top + 14.0 + 16.0 * k as f64;
            let lx = left + pw - 130.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{}" y="{}">{name}</text>"#,
                lx + 30.0,
                lx + 36.0,
                ly + 4.0
            );
        }
        s.push_str("</svg>\n");
        s
    }
}
