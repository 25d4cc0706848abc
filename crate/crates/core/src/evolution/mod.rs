//! Genetic algorithm with elite selection and asexual reproduction, an
//! evolution-strategies pretrainer, schedule-independent parallel evaluation
//! and checkpointing.

mod checkpoint;
mod curve;
mod es;
mod eval;
mod ga;
mod rng;

use thiserror::Error;

pub use checkpoint::{checkpoint_load, checkpoint_save, write_checkpoint, CheckpointError, CHECKPOINT_VERSION};
pub use curve::{emit_curve_csv, format_curve_csv, parse_curve_csv, CURVE_HEADER};
pub use es::{centered_ranks, es_epoch, run_es, EsConfig, EsState};
pub use eval::{evaluate_population, Evaluator, FAILURE_FITNESS};
pub use ga::{fitness_stats, ga_generation, mutate, select_elites, CurveRow, GaConfig, TrainingRun};
pub use rng::{Lineage, Purpose};

#[derive(Debug, Error, PartialEq)]
pub enum EvolutionError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error("curve CSV line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("{0}")]
    Io(String),
}
