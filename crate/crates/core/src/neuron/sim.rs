use serde::{Deserialize, Serialize};

use super::{resting_state, step_with_cutoff, NeuronParams, NeuronState, SpikeTrain, StimulusProtocol, VoltageTrace, SPIKE_CUTOFF};
use crate::error::{Error, Result};

pub const DEFAULT_DT_MS: f64 = 0.25;

/// Fallback resting potential when the model has no stable equilibrium at
/// the initial input.
pub const FALLBACK_V0: f64 = -70.0;

/// How the integration is started.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum InitialState {
    /// Lowest stable equilibrium under `I(0)`, else `v0 = -70` with `u0 = b v0`.
    #[default]
    Rest,
    Explicit { v: f64, u: f64 },
}

/// Fixed-step integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Integration step (ms), `0 < dt <= 1`.
    pub dt: f64,
    /// Total simulated time (ms).
    pub duration: f64,
    pub initial: InitialState,
    /// Reset threshold (mV).
    pub spike_cutoff: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT_MS,
            duration: 1000.0,
            initial: InitialState::Rest,
            spike_cutoff: SPIKE_CUTOFF,
        }
    }
}

impl SimConfig {
    pub fn new(duration: f64) -> Self {
        Self {
            duration,
            ..Self::default()
        }
    }

    /// Default settings spanning the whole protocol.
    pub fn for_protocol(protocol: &StimulusProtocol) -> Self {
        Self::new(protocol.duration_ms())
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_initial(mut self, v: f64, u: f64) -> Self {
        self.initial = InitialState::Explicit { v, u };
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= 1.0) {
            return Err(Error::invalid(format!("dt must lie in (0, 1] ms, got {}", self.dt)));
        }
        if !(self.duration.is_finite() && self.duration >= self.dt) {
            return Err(Error::invalid(format!(
                "duration {} ms shorter than one step of {} ms",
                self.duration, self.dt
            )));
        }
        if !self.spike_cutoff.is_finite() {
            return Err(Error::invalid("spike cutoff is not finite"));
        }
        if let InitialState::Explicit { v, u } = self.initial {
            if !(v.is_finite() && u.is_finite()) {
                return Err(Error::invalid("initial state is not finite"));
            }
        }
        Ok(())
    }

    /// Number of integration steps, `floor(duration / dt)`.
    pub fn steps(&self) -> usize {
        (self.duration / self.dt + 1e-9).floor() as usize
    }

    pub fn initial_state(&self, params: &NeuronParams, i0: f64) -> NeuronState {
        match self.initial {
            InitialState::Explicit { v, u } => NeuronState::new(v, u),
            InitialState::Rest => resting_state(params, i0)
                .unwrap_or(NeuronState::new(FALLBACK_V0, params.b * FALLBACK_V0)),
        }
    }
}

/// Output of [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub trace: VoltageTrace,
    pub spikes: SpikeTrain,
    pub final_state: NeuronState,
}

/// Integrate `params` under `protocol` on a fixed grid.
///
/// The trace holds `steps + 1` samples starting at `t = 0`. Step `k` uses the
/// input current at `t = (k - 1) dt`. When a step crosses the cutoff, the
/// stored sample is clamped to the cutoff and the spike is timed at `k dt`.
pub fn simulate(
    params: &NeuronParams,
    protocol: &StimulusProtocol,
    config: &SimConfig,
) -> Result<Simulation> {
    params.validate()?;
    config.validate()?;
    if protocol.duration_ms() + 1e-9 < config.duration {
        return Err(Error::invalid(format!(
            "protocol covers {} ms but simulation requests {} ms",
            protocol.duration_ms(),
            config.duration
        )));
    }

    let dt = config.dt;
    let n_steps = config.steps();
    let cutoff = config.spike_cutoff;
    let mut state = config.initial_state(params, protocol.current_at(0.0));

    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push(state.v.min(cutoff));
    let mut spikes = Vec::new();

    for k in 1..=n_steps {
        let t_prev = (k - 1) as f64 * dt;
        let i_now = protocol.current_at(t_prev);
        let out = step_with_cutoff(state, params, i_now, dt, cutoff).map_err(|d| Error::Divergence {
            step: k,
            time_ms: k as f64 * dt,
            v: d.v,
            u: d.u,
        })?;
        state = out.state;
        if out.spiked {
            samples.push(cutoff);
            spikes.push(k as f64 * dt);
        } else {
            samples.push(state.v);
        }
    }

    let duration = n_steps as f64 * dt;
    Ok(Simulation {
        trace: VoltageTrace {
            t0: 0.0,
            dt,
            samples,
        },
        spikes: SpikeTrain::new(spikes, duration)?,
        final_state: state,
    })
}
