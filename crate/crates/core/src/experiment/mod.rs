//! Experiment configuration, orchestration and on-disk artifacts.
//!
//! An experiment trains every arm (architecture and neuron model) once per
//! seed. Each run writes its training curve and checkpoint under
//! `<output_dir>/<arm>/`; the resolved configuration, `summary.csv` and
//! `timing.csv` sit at the top of the output directory.

mod config;
mod runner;

use thiserror::Error;

use crate::evolution::{CheckpointError, EvolutionError};

pub use config::{
    Architecture, Arm, ExperimentConfig, ExperimentKind, ExperimentSection, MnistSection, NetworkSection, TaskKind,
    TaskSection, PRESETS,
};
pub use runner::{
    checkpoint_path, curve_path, describe_connectome, format_summary_csv, load_resources, mean_std, prepare_arm,
    resume_experiment, run_experiment, run_experiment_with, run_seed, summarize_dir, ArmSummary, PreparedArm,
    Resources, RunContext, RunSummary, SeedSummary, SUMMARY_HEADER, TIMING_HEADER,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("build failed: {0}")]
    Build(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
}

impl From<CheckpointError> for ExperimentError {
    fn from(e: CheckpointError) -> Self {
        ExperimentError::Evolution(e.into())
    }
}
