//! Experiment driver for the `volte-core` schedulers: configuration,
//! seeded Monte-Carlo sweeps and CSV output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

pub use config::{Bandwidth, ExperimentConfig};
pub use error::SimError;
pub use experiment::{build_scenario, run_experiment, run_policy, RunRecord, Scenario};
pub use output::{emit_plotdata, read_results, write_results, write_summary, PlotFamily, ResultRow};
