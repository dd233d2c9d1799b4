//! Genetic-algorithm fitting of `(a, b, c, d)` to a target voltage trace.
//!
//! Fitness is the mean squared difference between the simulated and the
//! target trace. Each generation keeps the `elite_count` best individuals
//! unchanged and fills the rest with offspring: two tournament winners are
//! blended gene by gene with probability `crossover_rate` (otherwise
//! cloned), and each child is then perturbed with probability
//! `mutation_rate`.
//!
//! Random numbers are drawn only by the sequential generational loop.
//! Fitness evaluation runs in parallel and is deterministic, so a fixed seed
//! reproduces the whole run.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::trace_mse;
use crate::neuron::{simulate, NeuronParams, SimConfig, StimulusProtocol, VoltageTrace};

/// Fitness assigned to parameter sets whose simulation diverges (mV^2).
pub const DIVERGENCE_PENALTY: f64 = 1e9;

/// Closed interval for one gene.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneRange {
    pub low: f64,
    pub high: f64,
}

impl GeneRange {
    pub const fn new(low: f64, high: f64) -> Self {
        Self { low, high }
    }

    /// Range pinned to a single value.
    pub const fn fixed(value: f64) -> Self {
        Self::new(value, value)
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.low && x <= self.high
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.low, self.high)
    }
}

/// Search box for the four genes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub a: GeneRange,
    pub b: GeneRange,
    pub c: GeneRange,
    pub d: GeneRange,
}

impl Default for ParamBounds {
    fn default() -> Self {
        Self {
            a: GeneRange::new(-0.1, 2.0),
            b: GeneRange::new(-1.5, 0.4),
            c: GeneRange::new(-80.0, -40.0),
            d: GeneRange::new(-25.0, 25.0),
        }
    }
}

impl ParamBounds {
    pub fn genes(&self) -> [GeneRange; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn contains(&self, p: &NeuronParams) -> bool {
        self.genes().iter().zip(p.to_array()).all(|(r, x)| r.contains(x))
    }

    pub fn clamp(&self, p: &NeuronParams) -> NeuronParams {
        let g = self.genes();
        let x = p.to_array();
        NeuronParams::from_array(std::array::from_fn(|i| g[i].clamp(x[i])))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    /// Probability that a parent pair is recombined rather than cloned.
    pub crossover_rate: f64,
    /// Probability that an offspring is mutated.
    pub mutation_rate: f64,
    pub elite_count: usize,
    pub tournament_size: usize,
    pub bounds: ParamBounds,
    pub seed: u64,
    /// Stop once the best fitness is at or below this (mV^2).
    pub fitness_tolerance: f64,
    /// Mutation standard deviation as a fraction of each gene's range.
    pub mutation_scale: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            max_generations: 150,
            crossover_rate: 0.7,
            mutation_rate: 0.8,
            elite_count: 2,
            tournament_size: 3,
            bounds: ParamBounds::default(),
            seed: 0,
            fitness_tolerance: 1e-3,
            mutation_scale: 0.1,
        }
    }
}

impl GaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::invalid("population_size must be at least 2"));
        }
        if self.max_generations == 0 {
            return Err(Error::invalid("max_generations must be at least 1"));
        }
        for (name, r) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {r}")));
            }
        }
        if self.elite_count >= self.population_size {
            return Err(Error::invalid(format!(
                "elite_count {} must be below population_size {}",
                self.elite_count, self.population_size
            )));
        }
        if self.tournament_size == 0 {
            return Err(Error::invalid("tournament_size must be at least 1"));
        }
        for (name, g) in ["a", "b", "c", "d"].iter().zip(self.bounds.genes()) {
            if !(g.low.is_finite() && g.high.is_finite() && g.low <= g.high) {
                return Err(Error::invalid(format!(
                    "bounds for {name} are not ordered: [{}, {}]",
                    g.low, g.high
                )));
            }
        }
        if self.fitness_tolerance.is_nan() || self.fitness_tolerance < 0.0 {
            return Err(Error::invalid("fitness_tolerance must be non-negative"));
        }
        if !(self.mutation_scale >= 0.0 && self.mutation_scale.is_finite()) {
            return Err(Error::invalid("mutation_scale must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub params: NeuronParams,
    /// `None` until evaluated.
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(params: NeuronParams) -> Self {
        Self {
            params,
            fitness: None,
        }
    }

    fn score(&self) -> f64 {
        self.fitness.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    /// 1-based; generation 1 is the initial population.
    pub generation: usize,
    pub best_mse: f64,
    pub mean_mse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxGenerations,
    ToleranceReached,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub best: Individual,
    pub history: Vec<GenerationStats>,
    pub generations_run: usize,
    pub termination: Termination,
    pub seed: u64,
}

impl FitResult {
    pub fn best_fitness(&self) -> f64 {
        self.best.score()
    }

    /// Writes `generation,best_mse,mean_mse`.
    pub fn write_history_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::parse("history csv", e);
        w.write_record(["generation", "best_mse", "mean_mse"]).map_err(err)?;
        for h in &self.history {
            w.write_record([
                h.generation.to_string(),
                h.best_mse.to_string(),
                h.mean_mse.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::parse("history csv", e))?;
        Ok(())
    }
}

/// A target trace together with the protocol and grid that produced it.
#[derive(Debug, Clone)]
pub struct FitProblem {
    target: VoltageTrace,
    protocol: StimulusProtocol,
    sim: SimConfig,
}

impl FitProblem {
    /// The target must already lie on the simulation grid: same sample
    /// period and `steps + 1` samples.
    pub fn new(target: VoltageTrace, protocol: StimulusProtocol, sim: SimConfig) -> Result<Self> {
        sim.validate()?;
        if (target.dt - sim.dt).abs() > 1e-9 * sim.dt {
            return Err(Error::invalid(format!(
                "target sampled every {} ms but simulation uses dt = {} ms; resample first",
                target.dt, sim.dt
            )));
        }
        if target.len() != sim.steps() + 1 {
            return Err(Error::invalid(format!(
                "target has {} samples, simulation produces {}",
                target.len(),
                sim.steps() + 1
            )));
        }
        if protocol.duration_ms() + 1e-9 < sim.duration {
            return Err(Error::invalid("protocol is shorter than the simulation"));
        }
        Ok(Self {
            target,
            protocol,
            sim,
        })
    }

    pub fn target(&self) -> &VoltageTrace {
        &self.target
    }

    pub fn protocol(&self) -> &StimulusProtocol {
        &self.protocol
    }

    pub fn sim(&self) -> &SimConfig {
        &self.sim
    }

    /// Trace MSE against the target, or [`DIVERGENCE_PENALTY`] when the
    /// parameters cannot be simulated.
    pub fn evaluate(&self, params: &NeuronParams) -> f64 {
        match simulate(params, &self.protocol, &self.sim) {
            Ok(s) => trace_mse(&s.trace, &self.target).unwrap_or(DIVERGENCE_PENALTY),
            Err(_) => DIVERGENCE_PENALTY,
        }
    }
}

/// Uniform draws inside the bounds.
pub fn init_population<R: Rng + ?Sized>(config: &GaConfig, rng: &mut R) -> Vec<Individual> {
    let genes = config.bounds.genes();
    (0..config.population_size)
        .map(|_| {
            let x: [f64; 4] = std::array::from_fn(|i| {
                let u: f64 = rng.random();
                genes[i].low + u * genes[i].width()
            });
            Individual::new(NeuronParams::from_array(x))
        })
        .collect()
}

/// `alpha * x + (1 - alpha) * y`, exact at `alpha = 0`, `alpha = 1` and
/// `x = y`.
fn blend(x: f64, y: f64, alpha: f64) -> f64 {
    if alpha >= 0.5 {
        x - (1.0 - alpha) * (x - y)
    } else {
        y + alpha * (x - y)
    }
}

/// Per-gene arithmetic blend with the given mixing weights. The first child
/// takes weight `alpha` from `pa`, the second from `pb`.
pub fn crossover_with(pa: &Individual, pb: &Individual, alpha: [f64; 4]) -> (Individual, Individual) {
    let a = pa.params.to_array();
    let b = pb.params.to_array();
    let ca = std::array::from_fn(|i| blend(a[i], b[i], alpha[i]));
    let cb = std::array::from_fn(|i| blend(b[i], a[i], alpha[i]));
    (
        Individual::new(NeuronParams::from_array(ca)),
        Individual::new(NeuronParams::from_array(cb)),
    )
}

/// Blend crossover with a fresh uniform weight per gene.
pub fn crossover<R: Rng + ?Sized>(pa: &Individual, pb: &Individual, rng: &mut R) -> (Individual, Individual) {
    let alpha: [f64; 4] = std::array::from_fn(|_| rng.random());
    crossover_with(pa, pb, alpha)
}

/// With probability `mutation_rate`, adds zero-mean Gaussian noise with
/// standard deviation `mutation_scale * range` to every gene and clamps.
pub fn mutate<R: Rng + ?Sized>(ind: &Individual, config: &GaConfig, rng: &mut R) -> Individual {
    let roll: f64 = rng.random();
    if roll >= config.mutation_rate {
        return *ind;
    }
    let genes = config.bounds.genes();
    let x = ind.params.to_array();
    let y: [f64; 4] = std::array::from_fn(|i| {
        let sigma = config.mutation_scale * genes[i].width();
        if sigma > 0.0 {
            let n = Normal::new(0.0, sigma).expect("positive finite sigma");
            genes[i].clamp(x[i] + n.sample(rng))
        } else {
            genes[i].clamp(x[i])
        }
    });
    Individual::new(NeuronParams::from_array(y))
}

fn tournament<R: Rng + ?Sized>(pop: &[Individual], size: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..pop.len());
    for _ in 1..size {
        let i = rng.random_range(0..pop.len());
        let (fi, fb) = (pop[i].score(), pop[best].score());
        if fi < fb || (fi == fb && i < best) {
            best = i;
        }
    }
    best
}

type Observer<'a> = Box<dyn FnMut(&GenerationStats) + 'a>;

/// Configurable GA run over a [`FitProblem`].
pub struct Optimizer<'a> {
    problem: &'a FitProblem,
    config: GaConfig,
    planted: Vec<NeuronParams>,
    observer: Option<Observer<'a>>,
}

impl<'a> Optimizer<'a> {
    pub fn new(problem: &'a FitProblem, config: GaConfig) -> Self {
        Self {
            problem,
            config,
            planted: Vec::new(),
            observer: None,
        }
    }

    /// Places these parameter sets at the front of the initial population,
    /// clamped to the bounds.
    pub fn with_initial(mut self, params: Vec<NeuronParams>) -> Self {
        self.planted = params;
        self
    }

    /// Called once per evaluated generation.
    pub fn on_generation(mut self, f: impl FnMut(&GenerationStats) + 'a) -> Self {
        self.observer = Some(Box::new(f));
        self
    }

    pub fn run(mut self) -> Result<FitResult> {
        let cfg = self.config;
        cfg.validate()?;
        if self.planted.len() > cfg.population_size {
            return Err(Error::invalid("more planted individuals than population slots"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut pop = init_population(&cfg, &mut rng);
        for (slot, p) in pop.iter_mut().zip(&self.planted) {
            *slot = Individual::new(cfg.bounds.clamp(p));
        }

        let mut history = Vec::with_capacity(cfg.max_generations);
        let mut best: Option<Individual> = None;
        let mut termination = Termination::MaxGenerations;

        for generation in 1..=cfg.max_generations {
            let problem = self.problem;
            pop.par_iter_mut()
                .filter(|ind| ind.fitness.is_none())
                .for_each(|ind| ind.fitness = Some(problem.evaluate(&ind.params)));

            let mut order: Vec<usize> = (0..pop.len()).collect();
            order.sort_by(|&i, &j| pop[i].score().total_cmp(&pop[j].score()));
            let leader = pop[order[0]];
            let stats = GenerationStats {
                generation,
                best_mse: leader.score(),
                mean_mse: pop.iter().map(|i| i.score()).sum::<f64>() / pop.len() as f64,
            };
            history.push(stats);
            if let Some(f) = self.observer.as_mut() {
                f(&stats);
            }
            if best.is_none_or(|b| leader.score() < b.score()) {
                best = Some(leader);
            }
            if leader.score() <= cfg.fitness_tolerance {
                termination = Termination::ToleranceReached;
                break;
            }
            if generation == cfg.max_generations {
                break;
            }

            let mut next: Vec<Individual> = order[..cfg.elite_count].iter().map(|&i| pop[i]).collect();
            while next.len() < cfg.population_size {
                let p1 = pop[tournament(&pop, cfg.tournament_size, &mut rng)];
                let p2 = pop[tournament(&pop, cfg.tournament_size, &mut rng)];
                let roll: f64 = rng.random();
                let (c1, c2) = if roll < cfg.crossover_rate {
                    crossover(&p1, &p2, &mut rng)
                } else {
                    (p1, p2)
                };
                next.push(mutate(&c1, &cfg, &mut rng));
                if next.len() < cfg.population_size {
                    next.push(mutate(&c2, &cfg, &mut rng));
                }
            }
            pop = next;
        }

        Ok(FitResult {
            best: best.expect("at least one generation ran"),
            generations_run: history.len(),
            history,
            termination,
            seed: cfg.seed,
        })
    }
}

/// Fits `(a, b, c, d)` so that simulating `protocol` on the `sim` grid
/// reproduces `target`.
pub fn run_fit(
    target: &VoltageTrace,
    protocol: &StimulusProtocol,
    config: &GaConfig,
    sim: &SimConfig,
) -> Result<FitResult> {
    let problem = FitProblem::new(target.clone(), protocol.clone(), *sim)?;
    Optimizer::new(&problem, *config).run()
}
