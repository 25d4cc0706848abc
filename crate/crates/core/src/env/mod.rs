//! Episodic tasks that map a genome to a scalar fitness.

mod mnist;
mod quadratic;
mod swimmer;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network::{CompiledNetwork, Genome, NetworkError};

pub use mnist::{load_mnist, mnist_fitness, serialize_mnist, MnistDataset, MnistError, MnistTask, MNIST_PIXELS};
pub use quadratic::QuadraticTask;
pub use swimmer::{Swimmer, SwimmerConfig, SwimmerTask};

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum EnvError {
    #[error("step called after the episode ended")]
    EpisodeOver,
    #[error("action has {got} entries, expected {expected}")]
    ActionDimension { expected: usize, got: usize },
    #[error("non-finite action at index {0}")]
    NonFiniteAction(usize),
    #[error("non-finite state")]
    NonFiniteState,
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Reset/step contract shared by episodic environments.
pub trait Environment {
    fn obs_dim(&self) -> usize;
    fn action_dim(&self) -> usize;
    fn episode_length(&self) -> usize;
    fn reset(&mut self, seed: u64) -> Vec<f64>;
    fn step(&mut self, action: &[f64]) -> Result<Transition, EnvError>;
}

#[derive(Debug, Error, PartialEq)]
pub enum TaskError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("{0}")]
    Contract(String),
}

/// Scores one genome. Implementations must be pure functions of
/// `(genome, rng)` so that evaluation order and parallelism do not matter.
pub trait Task: Sync {
    fn evaluate(&self, genome: &Genome, rng: &mut ChaCha8Rng) -> Result<f64, TaskError>;
}

/// Runs one full episode of `net` in `env` and returns the summed reward.
pub fn rollout<E: Environment>(env: &mut E, net: &CompiledNetwork, seed: u64) -> Result<f64, TaskError> {
    let mut obs = env.reset(seed);
    let mut state = net.reset();
    let mut action = vec![0.0; net.action_dim()];
    let mut total = 0.0;
    loop {
        net.step(&mut state, &obs, &mut action)?;
        let t = env.step(&action)?;
        total += t.reward;
        if t.done {
            return Ok(total);
        }
        obs = t.obs;
    }
}
