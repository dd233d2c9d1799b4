//! Command-line front end.
//!
//! Every command validates its inputs and computes its results before
//! writing anything, and every file is written through a temporary sibling
//! and a rename, so a failed run leaves no partial output.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::catalog::{Catalog, PatternId, Region};
use crate::error::{Error, Result};
use crate::ga::{FitProblem, GaConfig, Optimizer};
use crate::io::{read_json, write_atomic, write_json, write_with};
use crate::metrics::{classify_label, extract_features, resample, FeatureConfig};
use crate::neuron::{simulate, step, NeuronParams, NeuronState, SimConfig, SpikeTrain, StimulusProtocol, VoltageTrace};
use crate::report::compare_report;
use crate::sort::{sort_recording, synthesize, RawRecording, SampleFormat, SortConfig, SynthConfig, ThresholdSpec};

pub const CONFIG_VERSION: u32 = 1;

/// Optional per-stage settings loaded with `--config`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub version: Option<u32>,
    #[serde(default)]
    pub ga: Option<GaConfig>,
    #[serde(default)]
    pub sim: Option<SimConfig>,
    #[serde(default)]
    pub sort: Option<SortConfig>,
    #[serde(default)]
    pub synth: Option<SynthConfig>,
    #[serde(default)]
    pub features: Option<FeatureConfig>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: ConfigFile = read_json(path)?;
        if let Some(v) = cfg.version {
            if v != CONFIG_VERSION {
                return Err(Error::parse(
                    "config",
                    format!("unsupported version {v} (expected {CONFIG_VERSION})"),
                ));
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Parser)]
#[command(name = "izhifit", version, about = "Izhikevich neuron simulation, fitting and spike sorting")]
pub struct Cli {
    /// Seed for every random component.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a parameter set and write the trace and spike times.
    Simulate(SimulateArgs),
    /// List the pattern catalog or dump its tables.
    Catalog(CatalogArgs),
    /// Classify the firing pattern of a trace or spike train.
    Classify(ClassifyArgs),
    /// Fit (a, b, c, d) to a target trace with the genetic algorithm.
    Fit(FitArgs),
    /// Sort spikes in an extracellular recording.
    Sort(SortArgs),
    /// Compare a target trace with the original and improved model.
    Compare(CompareArgs),
    /// Generate synthetic recordings or target traces.
    Synth(SynthArgs),
    /// Measure single-neuron stepping throughput.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Catalog pattern supplying parameters and protocol.
    #[arg(long)]
    pub pattern: Option<PatternId>,
    /// Use the optimized parameter set of the pattern.
    #[arg(long)]
    pub optimized: bool,
    /// Explicit parameters `a,b,c,d` (overrides the pattern's).
    #[arg(long, value_parser = parse_list::<4>, allow_hyphen_values = true)]
    pub params: Option<[f64; 4]>,
    /// Protocol JSON file (overrides the pattern's).
    #[arg(long)]
    pub protocol: Option<PathBuf>,
    /// Step protocol `amplitude,onset_ms,end_ms`.
    #[arg(long, value_parser = parse_list::<3>, allow_hyphen_values = true)]
    pub step: Option<[f64; 3]>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Integration step (ms).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Simulated time (ms); defaults to the protocol length.
    #[arg(long)]
    pub duration: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CatalogView {
    /// One line per pattern.
    List,
    /// Parameter table as CSV.
    Params,
    /// Region possibility matrix as CSV.
    Regions,
    /// Full catalog JSON.
    Json,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    #[arg(value_enum, default_value = "list")]
    pub view: CatalogView,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Voltage trace CSV (`time_ms,v_mV`).
    #[arg(long, conflicts_with = "spikes")]
    pub trace: Option<PathBuf>,
    /// Spike-time CSV (`spike_time_ms`).
    #[arg(long)]
    pub spikes: Option<PathBuf>,
    /// Catalog pattern whose protocol was applied.
    #[arg(long)]
    pub pattern: Option<PatternId>,
    /// Protocol JSON file.
    #[arg(long)]
    pub protocol: Option<PathBuf>,
    /// Spike detection threshold for traces (mV).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Target trace CSV. Without it, the target is simulated from the
    /// pattern's reference parameters.
    #[arg(long)]
    pub target: Option<PathBuf>,
    #[arg(long)]
    pub pattern: Option<PatternId>,
    #[arg(long)]
    pub protocol: Option<PathBuf>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SortArgs {
    /// Recording: flat binary with a JSON sidecar, or CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Number of clusters.
    #[arg(long)]
    pub k: Option<usize>,
    /// Manual detection level (signal units); default is automatic.
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub pattern: PatternId,
    /// Target trace CSV. Without it, a surrogate is built from the improved
    /// model plus Gaussian noise.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Noise level of the surrogate target (mV).
    #[arg(long, default_value_t = 0.5)]
    pub noise: f64,
    /// Also write an SVG plot.
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum SynthKind {
    /// Extracellular recording with ground-truth spike times.
    Recording {
        #[arg(long)]
        duration_s: Option<f64>,
        /// Trough depth of every unit in noise standard deviations.
        #[arg(long)]
        snr: Option<f64>,
        #[arg(long, value_enum, default_value = "f32")]
        format: BinFormat,
    },
    /// Model trace of a catalog pattern with additive noise.
    Target {
        #[arg(long)]
        pattern: PatternId,
        #[arg(long)]
        optimized: bool,
        #[arg(long, default_value_t = 0.5)]
        noise: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BinFormat {
    I16,
    F32,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(subcommand)]
    pub kind: SynthKind,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Number of steps to time.
    #[arg(long, default_value_t = 50_000_000)]
    pub steps: u64,
}

struct Ctx {
    seed: Option<u64>,
    config: ConfigFile,
    out: PathBuf,
    quiet: bool,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// Integration settings from the config; the duration always follows
    /// the protocol.
    fn sim_for(&self, protocol: &StimulusProtocol) -> SimConfig {
        let mut sim = self.config.sim.unwrap_or_default();
        sim.duration = protocol.duration_ms();
        sim
    }

    fn features(&self) -> FeatureConfig {
        self.config.features.unwrap_or_default()
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let ctx = Ctx {
        seed: cli.seed,
        config,
        out: cli.out,
        quiet: cli.quiet,
    };
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&ctx, a),
        Command::Catalog(a) => cmd_catalog(&ctx, a),
        Command::Classify(a) => cmd_classify(&ctx, a),
        Command::Fit(a) => cmd_fit(&ctx, a),
        Command::Sort(a) => cmd_sort(&ctx, a),
        Command::Compare(a) => cmd_compare(&ctx, a),
        Command::Synth(a) => cmd_synth(&ctx, a),
        Command::Bench(a) => cmd_bench(&ctx, a),
    }
}

/// Parses exactly `N` comma-separated numbers.
fn parse_list<const N: usize>(s: &str) -> std::result::Result<[f64; N], String> {
    let values: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected {N} comma-separated values, got {}", v.len()))
}

fn load_protocol(path: &Path) -> Result<StimulusProtocol> {
    read_json(path)
}

fn resolve_protocol(
    pattern: Option<PatternId>,
    file: Option<&PathBuf>,
    step: Option<&[f64; 3]>,
) -> Result<StimulusProtocol> {
    if let Some(p) = file {
        return load_protocol(p);
    }
    if let Some(s) = step {
        return StimulusProtocol::step(0.0, s[0], s[1], s[2]);
    }
    match pattern {
        Some(id) => Ok(Catalog::builtin().protocol_for(id).clone()),
        None => Err(Error::invalid("need --pattern, --protocol or --step")),
    }
}

fn resolve_params(m: &ModelArgs) -> Result<NeuronParams> {
    if let Some(p) = &m.params {
        return Ok(NeuronParams::new(p[0], p[1], p[2], p[3]));
    }
    let id = m
        .pattern
        .ok_or_else(|| Error::invalid("need --params or --pattern"))?;
    let cat = Catalog::builtin();
    let p = if m.optimized { cat.optimized_params(id) } else { cat.canonical_params(id) };
    p.ok_or_else(|| {
        Error::invalid(format!(
            "pattern {id} has no parameter set; pass --params a,b,c,d"
        ))
    })
}

fn meta(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn cmd_simulate(ctx: &Ctx, a: SimulateArgs) -> Result<()> {
    let params = resolve_params(&a.model)?;
    let protocol = resolve_protocol(a.model.pattern, a.model.protocol.as_ref(), a.model.step.as_ref())?;
    let mut sim = ctx.sim_for(&protocol);
    if let Some(d) = a.duration {
        sim.duration = d;
    }
    if let Some(dt) = a.dt {
        sim.dt = dt;
    }
    let out = simulate(&params, &protocol, &sim)?;
    let trace_csv = csv_bytes(|b| out.trace.write_csv(b))?;
    let spikes_csv = csv_bytes(|b| out.spikes.write_csv(b))?;
    let m = meta(&[
        ("params", format!("{},{},{},{}", params.a, params.b, params.c, params.d)),
        ("pattern", a.model.pattern.map_or("none".into(), |p| p.to_string())),
    ]);
    write_atomic(&ctx.path("trace.csv"), &trace_csv)?;
    write_atomic(&ctx.path("spikes.csv"), &spikes_csv)?;
    write_json(&ctx.path("trace.json"), &out.trace.to_envelope(m.clone()))?;
    write_json(&ctx.path("spikes.json"), &out.spikes.to_envelope(m))?;
    ctx.note(format!(
        "{} samples, {} spikes -> {}",
        out.trace.len(),
        out.spikes.len(),
        ctx.out.display()
    ));
    Ok(())
}

fn fmt_params(p: Option<NeuronParams>) -> [String; 4] {
    match p {
        Some(p) => [p.a, p.b, p.c, p.d].map(|x| x.to_string()),
        None => Default::default(),
    }
}

fn catalog_text(view: CatalogView) -> Result<(String, &'static str)> {
    let cat = Catalog::builtin();
    let csv_err = |e: csv::Error| Error::parse("catalog csv", e);
    Ok(match view {
        CatalogView::List => {
            let mut s = String::new();
            for spec in cat.specs() {
                let regions: Vec<&str> = Region::ALL
                    .iter()
                    .filter(|r| cat.region_allows(**r, spec.id))
                    .map(|r| r.as_str())
                    .collect();
                s.push_str(&format!(
                    "{:<28} {:<8} {:<8} {}\n",
                    spec.id.as_str(),
                    if spec.original.is_some() { "params" } else { "-" },
                    if regions.is_empty() { "-".to_string() } else { regions.join("+") },
                    spec.descriptor
                ));
            }
            (s, "catalog.txt")
        }
        CatalogView::Params => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["pattern", "set", "a", "b", "c", "d"]).map_err(csv_err)?;
            for id in cat.fitted_patterns() {
                let spec = cat.spec(id);
                for (set, p) in [("original", spec.original), ("optimized", spec.optimized)] {
                    let [a, b, c, d] = fmt_params(p);
                    w.write_record([id.as_str(), set, &a, &b, &c, &d]).map_err(csv_err)?;
                }
            }
            let bytes = w.into_inner().map_err(|e| Error::parse("catalog csv", e))?;
            (String::from_utf8(bytes).expect("csv is utf-8"), "params.csv")
        }
        CatalogView::Regions => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["region".to_string()];
            header.extend(PatternId::ALL.iter().map(|p| p.as_str().to_string()));
            w.write_record(&header).map_err(csv_err)?;
            for r in Region::ALL {
                let mut row = vec![r.as_str().to_string()];
                row.extend(
                    PatternId::ALL
                        .iter()
                        .map(|p| if cat.region_allows(r, *p) { "+" } else { "-" }.to_string()),
                );
                w.write_record(&row).map_err(csv_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::parse("catalog csv", e))?;
            (String::from_utf8(bytes).expect("csv is utf-8"), "regions.csv")
        }
        CatalogView::Json => (cat.to_json() + "\n", "catalog.json"),
    })
}

fn cmd_catalog(ctx: &Ctx, a: CatalogArgs) -> Result<()> {
    let (text, name) = catalog_text(a.view)?;
    print!("{text}");
    if ctx.out != Path::new(".") {
        write_atomic(&ctx.path(name), text.as_bytes())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ClassifyOutput {
    label: &'static str,
    features: crate::metrics::PatternFeatures,
}

fn cmd_classify(ctx: &Ctx, a: ClassifyArgs) -> Result<()> {
    let protocol = resolve_protocol(a.pattern, a.protocol.as_ref(), None)?;
    let (train, trace) = match (&a.trace, &a.spikes) {
        (Some(p), _) => {
            let tr = VoltageTrace::read_csv(crate::io::read_bytes(p)?.as_slice())?;
            (crate::metrics::spikes_from_trace(&tr, a.threshold), Some(tr))
        }
        (None, Some(p)) => (
            SpikeTrain::read_csv(crate::io::read_bytes(p)?.as_slice(), protocol.duration_ms())?,
            None,
        ),
        (None, None) => return Err(Error::invalid("need --trace or --spikes")),
    };
    let cfg = ctx.features();
    let features = extract_features(&train, trace.as_ref(), &protocol, &cfg);
    let out = ClassifyOutput {
        label: classify_label(&features, &cfg),
        features,
    };
    println!("{}", out.label);
    write_json(&ctx.path("classification.json"), &out)
}

fn cmd_fit(ctx: &Ctx, a: FitArgs) -> Result<()> {
    let protocol = resolve_protocol(a.pattern, a.protocol.as_ref(), None)?;
    let sim = ctx.sim_for(&protocol);
    let target = match &a.target {
        Some(p) => {
            let t = VoltageTrace::read_csv(crate::io::read_bytes(p)?.as_slice())?;
            let mut t = resample(&t, sim.dt)?;
            t.samples.truncate(sim.steps() + 1);
            t
        }
        None => {
            let id = a
                .pattern
                .ok_or_else(|| Error::invalid("need --target or --pattern"))?;
            let p = Catalog::builtin()
                .canonical_params(id)
                .ok_or_else(|| Error::invalid(format!("pattern {id} has no reference parameters")))?;
            simulate(&p, &protocol, &sim)?.trace
        }
    };
    let mut ga = ctx.config.ga.unwrap_or_default();
    if let Some(s) = ctx.seed {
        ga.seed = s;
    }
    if let Some(g) = a.generations {
        ga.max_generations = g;
    }
    if let Some(p) = a.population {
        ga.population_size = p;
    }
    ga.validate()?;
    let problem = FitProblem::new(target, protocol.clone(), sim)?;
    let quiet = ctx.quiet;
    let result = Optimizer::new(&problem, ga)
        .on_generation(|g| {
            if !quiet && (g.generation == 1 || g.generation % 10 == 0) {
                eprintln!("generation {:>4}  best {:.4}  mean {:.4e}", g.generation, g.best_mse, g.mean_mse);
            }
        })
        .run()?;
    let best = simulate(&result.best.params, &protocol, &sim)?;
    let history = csv_bytes(|b| result.write_history_csv(b))?;
    let best_csv = csv_bytes(|b| best.trace.write_csv(b))?;
    write_json(&ctx.path("fit.json"), &result)?;
    write_atomic(&ctx.path("history.csv"), &history)?;
    write_atomic(&ctx.path("best_trace.csv"), &best_csv)?;
    let p = result.best.params;
    ctx.note(format!(
        "best mse {:.4} after {} generations: a={} b={} c={} d={}",
        result.best_fitness(),
        result.generations_run,
        p.a,
        p.b,
        p.c,
        p.d
    ));
    Ok(())
}

#[derive(Serialize)]
struct UnitSummary {
    id: usize,
    spikes: usize,
    isi_violation_rate: f64,
    valid: bool,
    flags: Vec<String>,
    mean_waveform: Vec<f64>,
}

#[derive(Serialize)]
struct SortSummary {
    sample_rate: f64,
    duration_ms: f64,
    detection_level: f64,
    events: usize,
    skipped_events: usize,
    empty_clusters: Vec<usize>,
    units: Vec<UnitSummary>,
}

fn cmd_sort(ctx: &Ctx, a: SortArgs) -> Result<()> {
    let rec = RawRecording::load(&a.input)?;
    let mut cfg = ctx.config.sort.unwrap_or_default();
    if let Some(s) = ctx.seed {
        cfg.kmeans.seed = s;
    }
    if let Some(k) = a.k {
        cfg.kmeans.k = k;
    }
    if let Some(t) = a.threshold {
        cfg.detect.threshold = ThresholdSpec::Manual { level: t };
    }
    let out = sort_recording(&rec, &cfg)?;
    let mut files = Vec::new();
    for u in &out.report.units {
        files.push((format!("unit_{}.csv", u.id), csv_bytes(|b| u.train.write_csv(b))?));
    }
    let summary = SortSummary {
        sample_rate: rec.sample_rate,
        duration_ms: rec.duration_ms(),
        detection_level: out.detection.level,
        events: out.detection.events.len(),
        skipped_events: out.waveforms.skipped,
        empty_clusters: out.report.empty_clusters.clone(),
        units: out
            .report
            .units
            .iter()
            .map(|u| UnitSummary {
                id: u.id,
                spikes: u.train.len(),
                isi_violation_rate: u.isi_violation_rate,
                valid: u.valid,
                flags: u.flags.clone(),
                mean_waveform: u.mean_waveform.clone(),
            })
            .collect(),
    };
    for (name, bytes) in files {
        write_atomic(&ctx.path(&name), &bytes)?;
    }
    write_json(&ctx.path("units.json"), &summary)?;
    ctx.note(format!(
        "{} events, {} units ({} valid)",
        summary.events,
        summary.units.len(),
        summary.units.iter().filter(|u| u.valid).count()
    ));
    Ok(())
}

fn noisy(trace: &VoltageTrace, sd: f64, seed: u64) -> Result<VoltageTrace> {
    if sd < 0.0 || !sd.is_finite() {
        return Err(Error::invalid("noise must be non-negative"));
    }
    if sd == 0.0 {
        return Ok(trace.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = Normal::new(0.0, sd).expect("valid sd");
    let samples = trace.samples.iter().map(|v| v + n.sample(&mut rng)).collect();
    VoltageTrace::new(trace.t0, trace.dt, samples)
}

fn pattern_trace(id: PatternId, optimized: bool) -> Result<VoltageTrace> {
    let cat = Catalog::builtin();
    let p = if optimized { cat.optimized_params(id) } else { cat.canonical_params(id) };
    let p = p.ok_or_else(|| Error::invalid(format!("pattern {id} has no parameter set")))?;
    let protocol = cat.protocol_for(id);
    Ok(simulate(&p, protocol, &SimConfig::for_protocol(protocol))?.trace)
}

fn cmd_compare(ctx: &Ctx, a: CompareArgs) -> Result<()> {
    let target = match &a.target {
        Some(p) => VoltageTrace::read_csv(crate::io::read_bytes(p)?.as_slice())?,
        None => noisy(&pattern_trace(a.pattern, true)?, a.noise, ctx.seed.unwrap_or(0))?,
    };
    let report = compare_report(&target, a.pattern)?;
    let csv = csv_bytes(|b| report.write_csv(b))?;
    write_atomic(&ctx.path("compare.csv"), &csv)?;
    write_json(&ctx.path("compare.json"), &report.summary)?;
    if a.svg {
        write_atomic(&ctx.path("compare.svg"), report.to_svg().as_bytes())?;
    }
    ctx.note(format!(
        "mse target/original {:.3}, target/improved {:.3}",
        report.summary.mse_target_original, report.summary.mse_target_improved
    ));
    Ok(())
}

fn cmd_synth(ctx: &Ctx, a: SynthArgs) -> Result<()> {
    match a.kind {
        SynthKind::Recording {
            duration_s,
            snr,
            format,
        } => {
            let mut cfg = ctx.config.synth.clone().unwrap_or_default();
            if let Some(s) = ctx.seed {
                cfg.seed = s;
            }
            if let Some(d) = duration_s {
                cfg.duration_s = d;
            }
            if let Some(s) = snr {
                cfg.units.iter_mut().for_each(|u| u.snr = s);
            }
            let s = synthesize(&cfg)?;
            let (fmt, scale) = match format {
                BinFormat::F32 => (SampleFormat::F32, 1.0),
                BinFormat::I16 => (SampleFormat::I16, 0.1),
            };
            let truth = csv_bytes(|b| {
                let mut w = csv::Writer::from_writer(b);
                let err = |e: csv::Error| Error::parse("truth csv", e);
                w.write_record(["unit", "spike_time_ms"]).map_err(err)?;
                for t in &s.truth {
                    w.write_record([t.unit.to_string(), t.time_ms.to_string()]).map_err(err)?;
                }
                w.flush().map_err(|e| Error::parse("truth csv", e))?;
                Ok(())
            })?;
            s.recording.save_binary(&ctx.path("recording.bin"), fmt, scale)?;
            write_atomic(&ctx.path("truth.csv"), &truth)?;
            ctx.note(format!(
                "{} samples, {} spikes from {} units",
                s.recording.len(),
                s.truth.len(),
                cfg.units.len()
            ));
        }
        SynthKind::Target {
            pattern,
            optimized,
            noise,
        } => {
            let t = noisy(&pattern_trace(pattern, optimized)?, noise, ctx.seed.unwrap_or(0))?;
            write_with(&ctx.path("target.csv"), |b| t.write_csv(b))?;
            ctx.note(format!("{} samples", t.len()));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct BenchReport {
    steps: u64,
    seconds: f64,
    steps_per_second: f64,
    spikes: u64,
}

/// Steps a tonically firing neuron `steps` times and reports the rate.
pub fn bench_steps(steps: u64) -> (f64, u64) {
    let p = NeuronParams::new(0.02, 0.2, -65.0, 6.0);
    let mut s = NeuronState::new(-70.0, -14.0);
    let mut spikes = 0;
    let start = Instant::now();
    for _ in 0..steps {
        let out = step(std::hint::black_box(s), &p, 10.0, 0.25).expect("tonic neuron stays bounded");
        spikes += out.spiked as u64;
        s = out.state;
    }
    let secs = start.elapsed().as_secs_f64();
    std::hint::black_box(s);
    (secs, spikes)
}

fn cmd_bench(ctx: &Ctx, a: BenchArgs) -> Result<()> {
    if a.steps == 0 {
        return Err(Error::invalid("steps must be positive"));
    }
    let (seconds, spikes) = bench_steps(a.steps);
    let r = BenchReport {
        steps: a.steps,
        seconds,
        steps_per_second: a.steps as f64 / seconds,
        spikes,
    };
    println!("{:.3e} steps/s", r.steps_per_second);
    if ctx.out != Path::new(".") {
        write_json(&ctx.path("bench.json"), &r)?;
    }
    Ok(())
}
