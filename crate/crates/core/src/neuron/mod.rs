//! Two-variable Izhikevich neuron.
//!
//! ```text
//! dv/dt = 0.04 v^2 + 5 v + 140 - u + I
//! du/dt = a (b v - u)
//! if v >= +30 mV: v <- c, u <- u + d
//! ```
//!
//! Integration is forward Euler with a single full step per `dt`; both
//! derivatives are evaluated at the state at the start of the step.

mod sim;
mod stimulus;
mod trace;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sim::{simulate, InitialState, SimConfig, Simulation};
pub use stimulus::{Epoch, EpochKind, ProtocolBuilder, Segment, StimulusProtocol};
pub use trace::{SpikeTrain, TraceEnvelope, TrainEnvelope, VoltageTrace};

/// Spike cutoff voltage (mV).
pub const SPIKE_CUTOFF: f64 = 30.0;

/// Any intermediate |v| above this (mV) is treated as numerical blow-up.
pub const DIVERGENCE_LIMIT: f64 = 1000.0;

/// Allowed envelope for the reset voltage `c` (mV).
pub const RESET_VOLTAGE_RANGE: (f64, f64) = (-90.0, -30.0);

/// The Izhikevich parameter quadruple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronParams {
    /// Time scale of the recovery variable `u` (rate, 1/ms).
    pub a: f64,
    /// Sensitivity of `u` to subthreshold fluctuations of `v`.
    pub b: f64,
    /// After-spike reset value of `v` (mV).
    pub c: f64,
    /// After-spike increment of `u`.
    pub d: f64,
}

impl NeuronParams {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.to_array().iter().all(|x| x.is_finite()) {
            return Err(Error::invalid(format!("non-finite neuron parameters {self:?}")));
        }
        let (lo, hi) = RESET_VOLTAGE_RANGE;
        if !(lo..=hi).contains(&self.c) {
            return Err(Error::invalid(format!(
                "reset voltage c = {} outside [{lo}, {hi}] mV",
                self.c
            )));
        }
        Ok(())
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_array(genes: [f64; 4]) -> Self {
        Self::new(genes[0], genes[1], genes[2], genes[3])
    }
}

/// Membrane potential `v` (mV) and recovery variable `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronState {
    pub v: f64,
    pub u: f64,
}

impl NeuronState {
    pub const fn new(v: f64, u: f64) -> Self {
        Self { v, u }
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite() && self.u.is_finite()
    }
}

/// Result of one integration step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub state: NeuronState,
    pub spiked: bool,
}

/// Raised by [`step`] when the update leaves the finite, bounded regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diverged {
    pub v: f64,
    pub u: f64,
}

impl std::fmt::Display for Diverged {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "diverged to v = {}, u = {}", self.v, self.u)
    }
}

impl std::error::Error for Diverged {}

/// Advance the neuron by one forward-Euler step of length `dt` (ms) under
/// input current `i_now`, applying the after-spike reset.
///
/// When the reset fires, the returned state is exactly `v = c` and
/// `u = u_integrated + d`.
#[inline]
pub fn step(
    state: NeuronState,
    params: &NeuronParams,
    i_now: f64,
    dt: f64,
) -> std::result::Result<StepOutcome, Diverged> {
    step_with_cutoff(state, params, i_now, dt, SPIKE_CUTOFF)
}

#[inline]
pub(crate) fn step_with_cutoff(
    state: NeuronState,
    params: &NeuronParams,
    i_now: f64,
    dt: f64,
    cutoff: f64,
) -> std::result::Result<StepOutcome, Diverged> {
    let NeuronState { v, u } = state;
    let dv = 0.04 * v * v + 5.0 * v + 140.0 - u + i_now;
    let du = params.a * (params.b * v - u);
    let v_next = v + dt * dv;
    let u_next = u + dt * du;

    if !v_next.is_finite() || !u_next.is_finite() || v_next.abs() > DIVERGENCE_LIMIT {
        return Err(Diverged {
            v: v_next,
            u: u_next,
        });
    }

    if v_next >= cutoff {
        Ok(StepOutcome {
            state: NeuronState::new(params.c, u_next + params.d),
            spiked: true,
        })
    } else {
        Ok(StepOutcome {
            state: NeuronState::new(v_next, u_next),
            spiked: false,
        })
    }
}

/// Equilibria of the model under constant input `i_const`, ordered by `v`
/// ascending.
///
/// These are the real roots of `0.04 v^2 + (5 - b) v + 140 + I = 0` with
/// `u = b v`.
pub fn fixed_points(params: &NeuronParams, i_const: f64) -> Vec<NeuronState> {
    let qa = 0.04;
    let qb = 5.0 - params.b;
    let qc = 140.0 + i_const;
    let disc = qb * qb - 4.0 * qa * qc;
    if !disc.is_finite() || disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        let v = -qb / (2.0 * qa);
        return vec![NeuronState::new(v, params.b * v)];
    }
    let sq = disc.sqrt();
    // Numerically stable pair of roots.
    let q = -0.5 * (qb + qb.signum() * sq);
    let mut roots = [q / qa, qc / q];
    roots.sort_by(f64::total_cmp);
    roots
        .into_iter()
        .map(|v| NeuronState::new(v, params.b * v))
        .collect()
}

/// Linear stability of an equilibrium (trace/determinant of the Jacobian).
pub fn is_stable(params: &NeuronParams, eq: &NeuronState) -> bool {
    let j11 = 0.08 * eq.v + 5.0;
    let j12 = -1.0;
    let j21 = params.a * params.b;
    let j22 = -params.a;
    let trace = j11 + j22;
    let det = j11 * j22 - j12 * j21;
    trace < 0.0 && det > 0.0
}

/// Lowest stable equilibrium under `i_const`, if any.
pub fn resting_state(params: &NeuronParams, i_const: f64) -> Option<NeuronState> {
    fixed_points(params, i_const)
        .into_iter()
        .find(|eq| is_stable(params, eq))
}
