use rand_chacha::ChaCha8Rng;

use super::{Task, TaskError};
use crate::network::Genome;

/// `f(g) = -‖flatten(g) - target‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticTask {
    pub target: Vec<f64>,
}

impl QuadraticTask {
    pub fn new(target: Vec<f64>) -> Self {
        QuadraticTask { target }
    }

    pub fn zeros(dim: usize) -> Self {
        QuadraticTask { target: vec![0.0; dim] }
    }

    pub fn fitness(&self, x: &[f64]) -> Result<f64, TaskError> {
        if x.len() != self.target.len() {
            return Err(TaskError::Contract(format!("genome has {} genes, target has {}", x.len(), self.target.len())));
        }
        Ok(-x.iter().zip(&self.target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
    }
}

impl Task for QuadraticTask {
    fn evaluate(&self, genome: &Genome, _rng: &mut ChaCha8Rng) -> Result<f64, TaskError> {
        self.fitness(&genome.flatten())
    }
}
