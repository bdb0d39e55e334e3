//! Experiment orchestration: configuration, the trial grid and result files.

mod config;
mod experiment;
mod lowerbound;

pub use config::{AdversarySpec, ExperimentConfig, Format, InstanceSpec, Seeds};
pub use experiment::{run_experiment, Batch};
pub use lowerbound::{activation_trial, five_phase_trial, weight_trial, LowerBoundKind, LowerBoundReport};
