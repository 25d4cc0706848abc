use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{evaluate_population, Evaluator, EvolutionError, Lineage, Purpose};
use crate::env::Task;
use crate::network::{Genome, ParamGroup};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub elite_size: usize,
    pub mutation_rate_enc_dec: f64,
    pub mutation_rate_connectome: f64,
    pub decay_enc_dec: f64,
    pub decay_connectome: f64,
    pub generations: u64,
    /// Overridden per run by experiments.
    #[serde(default)]
    pub seed: u64,
}

impl GaConfig {
    pub fn biophysical_realism() -> Self {
        GaConfig {
            population_size: 750,
            elite_size: 8,
            mutation_rate_enc_dec: 0.01,
            mutation_rate_connectome: 0.01,
            decay_enc_dec: 0.997,
            decay_connectome: 0.997,
            generations: 1000,
            seed: 0,
        }
    }

    pub fn architecture_statistics() -> Self {
        GaConfig { mutation_rate_connectome: 0.02, ..Self::biophysical_realism() }
    }

    pub fn limitations() -> Self {
        GaConfig {
            mutation_rate_enc_dec: 0.02,
            mutation_rate_connectome: 0.02,
            decay_enc_dec: 0.998,
            decay_connectome: 0.998,
            ..Self::biophysical_realism()
        }
    }

    /// Same rates with a population small enough for a desktop.
    pub fn desk(self) -> Self {
        GaConfig { population_size: 50, elite_size: 4, generations: 100, ..self }
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        let fail = |m: String| Err(EvolutionError::Config(m));
        if self.population_size == 0 || self.elite_size == 0 {
            return fail("population and elite sizes must be at least 1".into());
        }
        if self.elite_size > self.population_size {
            return fail(format!("elite size {} exceeds population {}", self.elite_size, self.population_size));
        }
        for (name, r) in [("mutation_rate_enc_dec", self.mutation_rate_enc_dec), ("mutation_rate_connectome", self.mutation_rate_connectome)] {
            if !(r >= 0.0 && r.is_finite()) {
                return fail(format!("`{name}` must be a finite non-negative number, got {r}"));
            }
        }
        for (name, d) in [("decay_enc_dec", self.decay_enc_dec), ("decay_connectome", self.decay_connectome)] {
            if !(d > 0.0 && d <= 1.0) {
                return fail(format!("`{name}` must lie in (0, 1], got {d}"));
            }
        }
        Ok(())
    }
}

/// Child of a single parent: Gaussian noise with standard deviation
/// `rate_connectome` on every synapse gene and `rate_enc_dec` on every
/// encoder/decoder gene. Signs and neuron-model constants are copied from the
/// parent.
pub fn mutate<R: Rng + ?Sized>(g: &Genome, rate_enc_dec: f64, rate_connectome: f64, rng: &mut R) -> Genome {
    let mut child = g.clone();
    child.for_each_gene_mut(|group, w| {
        let rate = match group {
            ParamGroup::Connectome => rate_connectome,
            ParamGroup::EncDec => rate_enc_dec,
            ParamGroup::Shared => 0.0,
        };
        if rate != 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            *w += rate * z;
        }
    });
    child
}

/// Indices of the `k` fittest genomes, best first; ties go to the lower index.
pub fn select_elites(fitness: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Per-generation statistics and the mutation rates in effect afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub generation: u64,
    pub best: f64,
    pub mean: f64,
    pub std: f64,
    pub mutation_rate_connectome: f64,
    pub mutation_rate_enc_dec: f64,
}

/// Best over all genomes; mean and population standard deviation over the
/// finite fitness values only.
pub fn fitness_stats(fitness: &[f64]) -> (f64, f64, f64) {
    let best = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let finite: Vec<f64> = fitness.iter().copied().filter(|f| f.is_finite()).collect();
    if finite.is_empty() {
        return (best, f64::NEG_INFINITY, 0.0);
    }
    let n = finite.len() as f64;
    let mean = finite.iter().sum::<f64>() / n;
    let var = finite.iter().map(|f| (f - mean) * (f - mean)).sum::<f64>() / n;
    (best, mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingRun {
    pub config: GaConfig,
    pub lineage: Lineage,
    pub generation: u64,
    pub population: Vec<Genome>,
    pub fitness: Vec<f64>,
    pub curve: Vec<CurveRow>,
    pub rate_connectome: f64,
    pub rate_enc_dec: f64,
    /// Opaque description of the task, stored with checkpoints so a run can
    /// be resumed without its original configuration file.
    pub context: String,
}

impl TrainingRun {
    /// Generation 0: `base` followed by mutated copies of it, all evaluated.
    pub fn initialize(
        base: Genome,
        config: GaConfig,
        task: &dyn Task,
        evaluator: &Evaluator,
    ) -> Result<Self, EvolutionError> {
        config.validate()?;
        let lineage = Lineage::new(config.seed);
        let (rate_enc_dec, rate_connectome) = (config.mutation_rate_enc_dec, config.mutation_rate_connectome);
        let mut population = Vec::with_capacity(config.population_size);
        for i in 1..config.population_size {
            let mut rng = lineage.stream(Purpose::Init, 0, i as u64);
            population.push(mutate(&base, rate_enc_dec, rate_connectome, &mut rng));
        }
        population.insert(0, base);
        let mut run = TrainingRun {
            config,
            lineage,
            generation: 0,
            population,
            fitness: Vec::new(),
            curve: Vec::new(),
            rate_connectome,
            rate_enc_dec,
            context: String::new(),
        };
        run.evaluate(task, evaluator);
        Ok(run)
    }

    fn evaluate(&mut self, task: &dyn Task, evaluator: &Evaluator) {
        self.fitness = evaluate_population(&self.population, task, &self.lineage, self.generation, evaluator);
        let (best, mean, std) = fitness_stats(&self.fitness);
        self.curve.push(CurveRow {
            generation: self.generation,
            best,
            mean,
            std,
            mutation_rate_connectome: self.rate_connectome,
            mutation_rate_enc_dec: self.rate_enc_dec,
        });
    }

    pub fn best(&self) -> (&Genome, f64) {
        let i = select_elites(&self.fitness, 1)[0];
        (&self.population[i], self.fitness[i])
    }

    pub fn is_finished(&self) -> bool {
        self.generation >= self.config.generations
    }
}

/// Elite selection, asexual refill, rate decay and evaluation of the new
/// population.
pub fn ga_generation(run: &mut TrainingRun, task: &dyn Task, evaluator: &Evaluator) {
    let cfg = run.config;
    let elites = select_elites(&run.fitness, cfg.elite_size);
    let next_gen = run.generation + 1;
    let mut next: Vec<Genome> = elites.iter().map(|&i| run.population[i].clone()).collect();
    for k in 0..cfg.population_size - elites.len() {
        let parent = &run.population[elites[k % elites.len()]];
        let mut rng = run.lineage.stream(Purpose::Mutation, next_gen, (elites.len() + k) as u64);
        next.push(mutate(parent, run.rate_enc_dec, run.rate_connectome, &mut rng));
    }
    run.population = next;
    run.generation = next_gen;
    run.rate_connectome *= cfg.decay_connectome;
    run.rate_enc_dec *= cfg.decay_enc_dec;
    run.evaluate(task, evaluator);
}
