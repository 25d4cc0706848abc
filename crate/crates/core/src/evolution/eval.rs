use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};

use super::{EvolutionError, Lineage, Purpose};
use crate::env::Task;
use crate::network::Genome;

/// Fitness given to genomes whose evaluation fails or is not finite.
pub const FAILURE_FITNESS: f64 = f64::NEG_INFINITY;

/// Parallel fitness evaluation on a dedicated thread pool.
pub struct Evaluator {
    pool: ThreadPool,
}

impl std::fmt::Debug for Evaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Evaluator").field("workers", &self.workers()).finish()
    }
}

impl Evaluator {
    pub fn new(workers: usize) -> Result<Self, EvolutionError> {
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .thread_name(|i| format!("nema-eval-{i}"))
            .build()
            .map_err(|e| EvolutionError::Config(format!("cannot start {workers} workers: {e}")))?;
        Ok(Evaluator { pool })
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Evaluates every genome with the stream produced by `stream(index)`.
    /// The result is independent of the number of workers.
    pub fn evaluate<F>(&self, genomes: &[Genome], task: &dyn Task, stream: F) -> Vec<f64>
    where
        F: Fn(usize) -> ChaCha8Rng + Sync,
    {
        self.pool.install(|| {
            genomes
                .par_iter()
                .enumerate()
                .map(|(i, g)| {
                    let mut rng = stream(i);
                    match task.evaluate(g, &mut rng) {
                        Ok(f) if !f.is_nan() => f,
                        _ => FAILURE_FITNESS,
                    }
                })
                .collect()
        })
    }
}

/// Fitness of each genome using the per-individual evaluation streams of
/// `generation`.
pub fn evaluate_population(
    genomes: &[Genome],
    task: &dyn Task,
    lineage: &Lineage,
    generation: u64,
    evaluator: &Evaluator,
) -> Vec<f64> {
    evaluator.evaluate(genomes, task, |i| lineage.stream(Purpose::Evaluation, generation, i as u64))
}
