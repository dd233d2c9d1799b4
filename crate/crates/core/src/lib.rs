//! # izhifit
//!
//! Simulation and fitting toolkit for the two-variable Izhikevich spiking
//! neuron, together with the analysis chain needed to compare model output
//! against extracellular recordings.
//!
//! The crate is organised by pipeline stage:
//!
//! - [`neuron`]: forward-Euler integration of the model, stimulus protocols,
//!   voltage traces and spike trains.
//! - [`catalog`]: the firing-pattern catalog (reference parameter sets,
//!   optimized parameter sets, eliciting protocols, region possibility sets).
//! - [`metrics`]: trace comparison, spike-train statistics and rule-based
//!   firing-pattern classification.
//! - [`ga`]: genetic-algorithm fitting of `(a, b, c, d)` to a target trace.
//! - [`sort`]: bandpass filtering, threshold detection, PCA features,
//!   k-means clustering and unit validation for extracellular recordings,
//!   plus a synthetic recording generator.
//! - [`report`]: target / original / improved comparison reports with CSV,
//!   JSON and SVG output.
//! - [`cli`]: the command-line front end used by the `izhifit` binary.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod ga;
pub mod io;
pub mod metrics;
pub mod neuron;
pub mod report;
pub mod sort;

pub use catalog::{Catalog, PatternId, PatternSpec, Region};
pub use error::{Error, Result};
pub use neuron::{
    simulate, step, NeuronParams, NeuronState, SimConfig, Simulation, SpikeTrain,
    StimulusProtocol, VoltageTrace,
};
