//! Simulation of a heterogeneous radio access network in which small cells
//! run on renewable generation and batteries around an on-grid macro station.
//!
//! The crate builds the layout and user population ([`scenario`]), evaluates
//! links ([`radio`]), models generation, storage and consumption
//! ([`energy`]), assigns users to cells ([`assignment`]), moves them
//! ([`mobility`]) and binds everything in a one-second tick loop
//! ([`engine`]). [`metrics`] reduces a run to load shares, outage and energy
//! efficiency; [`output`] writes CSV/JSON artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod config;
pub mod energy;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod mobility;
pub mod output;
pub mod radio;
pub mod scenario;

pub use assignment::{Algorithm, AssignmentDecision, CellLoadView, Outcome, Serving};
pub use config::{RunManifest, SimConfig};
pub use engine::{run, run_batch, BatchSummary, MetricsLog, Simulation, SimulationRun};
pub use error::{Error, Result};
pub use metrics::EnergyEfficiencyReport;
