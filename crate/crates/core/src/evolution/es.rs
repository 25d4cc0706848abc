use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{Evaluator, EvolutionError, Lineage, Purpose};
use crate::env::Task;
use crate::network::{Genome, ParamGroup};

/// Evolution strategies with mirrored sampling and centered-rank fitness
/// shaping. Noise scale and learning rate are kept per parameter group;
/// neuron-model constants use the connectome values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsConfig {
    pub population_size: usize,
    pub sigma_connectome: f64,
    pub sigma_enc_dec: f64,
    pub learning_rate_connectome: f64,
    pub learning_rate_enc_dec: f64,
    pub sigma_decay: f64,
    pub learning_rate_decay: f64,
    pub epochs: u64,
    /// Overridden per run by experiments.
    #[serde(default)]
    pub seed: u64,
}

impl EsConfig {
    pub fn full() -> Self {
        EsConfig {
            population_size: 200,
            sigma_connectome: 0.1,
            sigma_enc_dec: 0.1,
            learning_rate_connectome: 0.1,
            learning_rate_enc_dec: 0.1,
            sigma_decay: 0.999,
            learning_rate_decay: 0.999,
            epochs: 1000,
            seed: 0,
        }
    }

    pub fn desk() -> Self {
        EsConfig { population_size: 40, epochs: 100, ..Self::full() }
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        if self.population_size < 2 || self.population_size % 2 != 0 {
            return Err(EvolutionError::Config(format!(
                "ES population must be even and at least 2, got {}",
                self.population_size
            )));
        }
        for (name, x) in [
            ("sigma_connectome", self.sigma_connectome),
            ("sigma_enc_dec", self.sigma_enc_dec),
            ("learning_rate_connectome", self.learning_rate_connectome),
            ("learning_rate_enc_dec", self.learning_rate_enc_dec),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(EvolutionError::Config(format!("`{name}` must be positive, got {x}")));
            }
        }
        for (name, d) in [("sigma_decay", self.sigma_decay), ("learning_rate_decay", self.learning_rate_decay)] {
            if !(d > 0.0 && d <= 1.0) {
                return Err(EvolutionError::Config(format!("`{name}` must lie in (0, 1], got {d}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsState {
    pub theta: Genome,
    pub epoch: u64,
    pub sigma_connectome: f64,
    pub sigma_enc_dec: f64,
    pub learning_rate_connectome: f64,
    pub learning_rate_enc_dec: f64,
    pub lineage: Lineage,
}

impl EsState {
    pub fn new(theta: Genome, cfg: &EsConfig) -> Self {
        EsState {
            theta,
            epoch: 0,
            sigma_connectome: cfg.sigma_connectome,
            sigma_enc_dec: cfg.sigma_enc_dec,
            learning_rate_connectome: cfg.learning_rate_connectome,
            learning_rate_enc_dec: cfg.learning_rate_enc_dec,
            lineage: Lineage::new(cfg.seed),
        }
    }
}

/// Ranks mapped linearly onto `[-0.5, 0.5]`; tied values share their average
/// rank, so a constant vector maps to all zeros.
pub fn centered_ranks(fitness: &[f64]) -> Vec<f64> {
    let n = fitness.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && fitness[order[end]].total_cmp(&fitness[order[start]]).is_eq() {
            end += 1;
        }
        let avg = (start + end - 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    let scale = (n - 1) as f64;
    ranks.iter().map(|r| r / scale - 0.5).collect()
}

/// One ES update of `state.theta`; returns the fitness of every perturbed
/// candidate (`+ε_i` at `2i`, `-ε_i` at `2i+1`).
pub fn es_epoch(state: &mut EsState, cfg: &EsConfig, task: &dyn Task, evaluator: &Evaluator) -> Vec<f64> {
    let flat = state.theta.flatten();
    let enc_dec = state.theta.group_range(ParamGroup::EncDec);
    let sigma: Vec<f64> =
        (0..flat.len()).map(|k| if enc_dec.contains(&k) { state.sigma_enc_dec } else { state.sigma_connectome }).collect();
    let pairs = cfg.population_size / 2;

    let noise: Vec<Vec<f64>> = (0..pairs)
        .map(|i| {
            let mut rng = state.lineage.stream(Purpose::EsNoise, state.epoch, i as u64);
            (0..flat.len()).map(|_| rng.sample(StandardNormal)).collect()
        })
        .collect();
    let mut candidates = Vec::with_capacity(2 * pairs);
    for eps in &noise {
        for dir in [1.0, -1.0] {
            let x: Vec<f64> = flat.iter().zip(eps).zip(&sigma).map(|((t, e), s)| t + dir * s * e).collect();
            candidates.push(state.theta.unflatten(&x).expect("candidate has the genome's length"));
        }
    }
    let epoch = state.epoch;
    let lineage = state.lineage;
    let fitness = evaluator.evaluate(&candidates, task, |j| lineage.stream(Purpose::EsEvaluation, epoch, j as u64));
    let shaped = centered_ranks(&fitness);

    let n = (2 * pairs) as f64;
    let mut next = flat;
    for (i, eps) in noise.iter().enumerate() {
        let weight = shaped[2 * i] - shaped[2 * i + 1];
        if weight == 0.0 {
            continue;
        }
        for (k, (x, e)) in next.iter_mut().zip(eps).enumerate() {
            let lr = if enc_dec.contains(&k) { state.learning_rate_enc_dec } else { state.learning_rate_connectome };
            *x += lr / (n * sigma[k]) * weight * e;
        }
    }
    state.theta = state.theta.unflatten(&next).expect("update keeps the genome's length");
    state.epoch += 1;
    state.sigma_connectome *= cfg.sigma_decay;
    state.sigma_enc_dec *= cfg.sigma_decay;
    state.learning_rate_connectome *= cfg.learning_rate_decay;
    state.learning_rate_enc_dec *= cfg.learning_rate_decay;
    fitness
}

/// Runs `cfg.epochs` updates starting from `theta`.
pub fn run_es(theta: Genome, cfg: &EsConfig, task: &dyn Task, evaluator: &Evaluator) -> Result<EsState, EvolutionError> {
    cfg.validate()?;
    let mut state = EsState::new(theta, cfg);
    for _ in 0..cfg.epochs {
        es_epoch(&mut state, cfg, task, evaluator);
    }
    Ok(state)
}
