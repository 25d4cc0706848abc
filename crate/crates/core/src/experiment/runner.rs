use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{Architecture, Arm, ExperimentConfig, ExperimentError, TaskKind};
use crate::connectome::{generate_locomotion_circuit, parse_connectome, stats, Connectome, NeuronClass};
use crate::env::{load_mnist, MnistDataset, MnistTask, SwimmerTask, Task, MNIST_PIXELS};
use crate::evolution::{
    checkpoint_load, emit_curve_csv, ga_generation, parse_curve_csv, run_es, write_checkpoint, CurveRow, EsConfig, Evaluator,
    GaConfig, Lineage, TrainingRun,
};
use crate::network::{
    build_exact, build_fully_connected, build_random_sparse, build_stat_matched, Genome, InitWeights, IoShape, IoSpec,
    NetworkSpec,
};

const BUILD_TAG: u64 = 1;
const ES_TAG: u64 = 2;
const GA_TAG: u64 = 3;

pub const SUMMARY_HEADER: &str = "arm,seed,generations,initial_mean,initial_best,final_best,final_mean";
pub const TIMING_HEADER: &str = "arm,seed,pretrain_seconds,ga_seconds";

/// Data shared by every arm and seed of an experiment.
#[derive(Debug, Clone)]
pub struct Resources {
    pub connectome: Connectome,
    pub mnist: Option<Arc<MnistDataset>>,
}

pub fn load_resources(cfg: &ExperimentConfig) -> Result<Resources, ExperimentError> {
    let connectome = match &cfg.network.connectome {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            parse_connectome(&text).map_err(|e| ExperimentError::Build(format!("{}: {e}", path.display())))?
        }
        None => generate_locomotion_circuit(cfg.network.segments, &cfg.network.circuit())
            .map_err(|e| ExperimentError::Config(e.to_string()))?,
    };
    let mnist = match cfg.task.kind {
        TaskKind::Swimmer => None,
        TaskKind::Mnist => {
            let (ip, lp) = (cfg.mnist.images_path(), cfg.mnist.labels_path());
            let images = std::fs::read(&ip).map_err(|e| io_error(&ip, e))?;
            let labels = std::fs::read(&lp).map_err(|e| io_error(&lp, e))?;
            let data = load_mnist(&images, &labels).map_err(|e| ExperimentError::Build(format!("{}: {e}", ip.display())))?;
            if cfg.mnist.subset_size > data.len() {
                return Err(ExperimentError::Config(format!(
                    "`mnist.subset_size` {} exceeds the {} available images",
                    cfg.mnist.subset_size,
                    data.len()
                )));
            }
            Some(Arc::new(data))
        }
    };
    Ok(Resources { connectome, mnist })
}

fn io_error(path: &Path, e: std::io::Error) -> ExperimentError {
    ExperimentError::Io(format!("{}: {e}", path.display()))
}

/// Network, initial genome and fitness task for one arm and seed.
pub struct PreparedArm {
    pub spec: Arc<NetworkSpec>,
    pub genome: Genome,
    pub task: Box<dyn Task>,
}

fn io_shape(cfg: &ExperimentConfig) -> IoShape {
    let (obs_dim, action_dim) = match cfg.task.kind {
        TaskKind::Swimmer => (cfg.swimmer.obs_dim(), cfg.swimmer.joints()),
        TaskKind::Mnist => (MNIST_PIXELS, 10),
    };
    IoShape { obs_dim, action_dim, substeps: cfg.network.substeps }
}

/// Builds the network of `arm` from the seed's build stream. Connectome arms
/// encode onto motor neurons and decode from muscle cells.
pub fn prepare_arm(
    cfg: &ExperimentConfig,
    res: &Resources,
    arm: Arm,
    seed: u64,
) -> Result<PreparedArm, ExperimentError> {
    let build_seed = Lineage::new(seed).derive(BUILD_TAG);
    let c = &res.connectome;
    let model = cfg.model(arm.neuron);
    let shape = io_shape(cfg);
    let connectome_io = || {
        let (inputs, outputs) = (c.class_ids(NeuronClass::Motor), c.class_ids(NeuronClass::Muscle));
        if inputs.is_empty() || outputs.is_empty() {
            return Err(ExperimentError::Build("the connectome needs motor and muscle neurons".into()));
        }
        Ok(IoSpec::new(shape, inputs, outputs, arm.neuron))
    };
    let init = InitWeights::for_model(arm.neuron);
    let built = match arm.architecture {
        Architecture::ExactConnectome => build_exact(c, model, connectome_io()?, init, build_seed),
        Architecture::StatMatched => build_stat_matched(&stats(c), model, connectome_io()?, init, build_seed),
        Architecture::FullyConnected => build_fully_connected(c.len(), shape, model, build_seed),
        Architecture::RandomSparse => build_random_sparse(c.len(), shape, model, build_seed),
    };
    let (spec, genome) = built.map_err(|e| ExperimentError::Build(format!("{arm}: {e}")))?;
    let spec = Arc::new(spec);
    let task: Box<dyn Task> = match cfg.task.kind {
        TaskKind::Swimmer => Box::new(SwimmerTask { spec: spec.clone(), cfg: cfg.swimmer }),
        TaskKind::Mnist => {
            let data = res.mnist.clone().ok_or_else(|| ExperimentError::Build("MNIST data not loaded".into()))?;
            Box::new(
                MnistTask::new(spec.clone(), data, cfg.mnist.subset_size, cfg.mnist.subset_seed)
                    .map_err(|e| ExperimentError::Build(e.to_string()))?,
            )
        }
    };
    Ok(PreparedArm { spec, genome, task })
}

/// Stored in every checkpoint so `resume` needs nothing else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunContext {
    pub arm: Arm,
    pub seed: u64,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedSummary {
    pub arm: Arm,
    pub seed: u64,
    pub generations: u64,
    pub initial_mean: f64,
    pub initial_best: f64,
    pub final_best: f64,
    pub final_mean: f64,
    pub pretrain_seconds: f64,
    pub ga_seconds: f64,
}

impl SeedSummary {
    /// Everything but the timings is read off the curve.
    pub fn from_curve(arm: Arm, seed: u64, curve: &[CurveRow]) -> Option<Self> {
        let (first, last) = (curve.first()?, curve.last()?);
        Some(SeedSummary {
            arm,
            seed,
            generations: last.generation,
            initial_mean: first.mean,
            initial_best: first.best,
            final_best: last.best,
            final_mean: last.mean,
            pretrain_seconds: 0.0,
            ga_seconds: 0.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmSummary {
    pub arm: Arm,
    pub seeds: Vec<SeedSummary>,
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (mean, (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt())
}

impl ArmSummary {
    fn column(&self, f: impl Fn(&SeedSummary) -> f64) -> Vec<f64> {
        self.seeds.iter().map(f).collect()
    }

    pub fn final_best(&self) -> (f64, f64) {
        mean_std(&self.column(|s| s.final_best))
    }

    pub fn final_mean(&self) -> (f64, f64) {
        mean_std(&self.column(|s| s.final_mean))
    }

    pub fn initial_mean(&self) -> (f64, f64) {
        mean_std(&self.column(|s| s.initial_mean))
    }

    pub fn initial_best(&self) -> (f64, f64) {
        mean_std(&self.column(|s| s.initial_best))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub arms: Vec<ArmSummary>,
    pub wall_seconds: f64,
}

impl RunSummary {
    pub fn arm(&self, arm: Arm) -> Option<&ArmSummary> {
        self.arms.iter().find(|a| a.arm == arm)
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Per-seed rows followed by `mean` and `std` rows for every arm.
pub fn format_summary_csv(arms: &[ArmSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for a in arms {
        for s in &a.seeds {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                a.arm,
                s.seed,
                s.generations,
                num(s.initial_mean),
                num(s.initial_best),
                num(s.final_best),
                num(s.final_mean)
            );
        }
        let cols = [a.initial_mean(), a.initial_best(), a.final_best(), a.final_mean()];
        let _ = writeln!(out, "{},mean,,{}", a.arm, cols.iter().map(|c| num(c.0)).collect::<Vec<_>>().join(","));
        let _ = writeln!(out, "{},std,,{}", a.arm, cols.iter().map(|c| num(c.1)).collect::<Vec<_>>().join(","));
    }
    out
}

fn format_timing_csv(arms: &[ArmSummary]) -> String {
    let mut out = String::from(TIMING_HEADER);
    out.push('\n');
    for s in arms.iter().flat_map(|a| &a.seeds) {
        let _ = writeln!(out, "{},{},{:.3},{:.3}", s.arm, s.seed, s.pretrain_seconds, s.ga_seconds);
    }
    out
}

pub fn curve_path(dir: &Path, arm: Arm, seed: u64) -> PathBuf {
    dir.join(arm.slug()).join(format!("curve_{seed}.csv"))
}

pub fn checkpoint_path(dir: &Path, arm: Arm, seed: u64) -> PathBuf {
    dir.join(arm.slug()).join(format!("checkpoint_{seed}.bin"))
}

/// Rebuilds the summary of `cfg` from the curves found under `dir`.
pub fn summarize_dir(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<ArmSummary>, ExperimentError> {
    let mut arms = Vec::new();
    for &arm in &cfg.experiment.arms {
        let mut seeds = Vec::new();
        for &seed in &cfg.experiment.seeds {
            let path = curve_path(dir, arm, seed);
            if !path.is_file() {
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
            let curve = parse_curve_csv(&text).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
            seeds.extend(SeedSummary::from_curve(arm, seed, &curve));
        }
        arms.push(ArmSummary { arm, seeds });
    }
    Ok(arms)
}

fn write_text(path: &Path, text: &str) -> Result<(), ExperimentError> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn save(run: &TrainingRun, dir: &Path, arm: Arm, seed: u64) -> Result<(), ExperimentError> {
    let cp = checkpoint_path(dir, arm, seed);
    write_checkpoint(run, &cp).map_err(|e| io_error(&cp, e))?;
    emit_curve_csv(&run.curve, &curve_path(dir, arm, seed)).map_err(|e| ExperimentError::Io(e.to_string()))
}

/// Runs the remaining generations of `run`, checkpointing every
/// `checkpoint_every` generations and after the last one.
fn finish_ga(
    run: &mut TrainingRun,
    task: &dyn Task,
    evaluator: &Evaluator,
    cfg: &ExperimentConfig,
    arm: Arm,
    seed: u64,
    progress: &mut dyn FnMut(&str),
) -> Result<(), ExperimentError> {
    let dir = &cfg.experiment.output_dir;
    let every = cfg.experiment.checkpoint_every;
    while !run.is_finished() {
        ga_generation(run, task, evaluator);
        let row = run.curve.last().expect("curve has a row per generation");
        progress(&format!("{arm} seed {seed} generation {}: best {:.6} mean {:.6}", row.generation, row.best, row.mean));
        if run.generation % every == 0 && !run.is_finished() {
            save(run, dir, arm, seed)?;
        }
    }
    save(run, dir, arm, seed)
}

fn evaluator(cfg: &ExperimentConfig) -> Result<Evaluator, ExperimentError> {
    Evaluator::new(cfg.experiment.workers).map_err(|e| ExperimentError::Config(e.to_string()))
}

/// One arm and seed: optional ES pretraining, then the GA.
pub fn run_seed(
    cfg: &ExperimentConfig,
    res: &Resources,
    evaluator: &Evaluator,
    arm: Arm,
    seed: u64,
    progress: &mut dyn FnMut(&str),
) -> Result<SeedSummary, ExperimentError> {
    let prepared = prepare_arm(cfg, res, arm, seed)?;
    let lineage = Lineage::new(seed);
    let t0 = Instant::now();
    let base = match &cfg.es {
        Some(es) => {
            let es = EsConfig { seed: lineage.derive(ES_TAG), ..*es };
            let state = run_es(prepared.genome, &es, prepared.task.as_ref(), evaluator)?;
            progress(&format!("{arm} seed {seed}: {} ES epochs done", state.epoch));
            state.theta
        }
        None => prepared.genome,
    };
    let pretrain_seconds = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let ga = GaConfig { seed: lineage.derive(GA_TAG), ..cfg.ga };
    let mut run = TrainingRun::initialize(base, ga, prepared.task.as_ref(), evaluator)?;
    run.context = toml::to_string(&RunContext { arm, seed, config: cfg.clone() }).expect("contexts serialize");
    let row = run.curve[0];
    progress(&format!("{arm} seed {seed} generation 0: best {:.6} mean {:.6}", row.best, row.mean));
    std::fs::create_dir_all(cfg.experiment.output_dir.join(arm.slug()))
        .map_err(|e| io_error(&cfg.experiment.output_dir, e))?;
    finish_ga(&mut run, prepared.task.as_ref(), evaluator, cfg, arm, seed, progress)?;
    let mut summary = SeedSummary::from_curve(arm, seed, &run.curve).expect("curve is non-empty");
    summary.pretrain_seconds = pretrain_seconds;
    summary.ga_seconds = t1.elapsed().as_secs_f64();
    Ok(summary)
}

/// Runs every arm and seed sequentially and writes `config.toml`,
/// `<arm>/curve_<seed>.csv`, `<arm>/checkpoint_<seed>.bin`, `summary.csv`
/// and `timing.csv` under the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    run_experiment_with(cfg, &mut |_| {})
}

pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    progress: &mut dyn FnMut(&str),
) -> Result<RunSummary, ExperimentError> {
    cfg.validate()?;
    let res = load_resources(cfg)?;
    let evaluator = evaluator(cfg)?;
    let start = Instant::now();
    let dir = &cfg.experiment.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    write_text(&dir.join("config.toml"), &cfg.to_toml())?;

    let mut arms = Vec::new();
    for &arm in &cfg.experiment.arms {
        let mut seeds = Vec::new();
        for &seed in &cfg.experiment.seeds {
            seeds.push(run_seed(cfg, &res, &evaluator, arm, seed, progress)?);
        }
        arms.push(ArmSummary { arm, seeds });
    }
    write_text(&dir.join("summary.csv"), &format_summary_csv(&arms))?;
    write_text(&dir.join("timing.csv"), &format_timing_csv(&arms))?;
    Ok(RunSummary { output_dir: dir.clone(), arms, wall_seconds: start.elapsed().as_secs_f64() })
}

/// Loads a checkpoint and trains it to the configured generation count, or
/// to `generations` when given. The checkpoint's run directory is written in
/// place and `summary.csv` is rebuilt from the curves present. Relative paths
/// in the stored configuration resolve against the working directory.
pub fn resume_experiment(
    checkpoint: &Path,
    workers: Option<usize>,
    generations: Option<u64>,
    progress: &mut dyn FnMut(&str),
) -> Result<SeedSummary, ExperimentError> {
    let bytes = std::fs::read(checkpoint).map_err(|e| io_error(checkpoint, e))?;
    let mut run = checkpoint_load(&bytes)?;
    let mut ctx: RunContext = toml::from_str(&run.context)
        .map_err(|e| ExperimentError::Config(format!("checkpoint context: {e}")))?;
    if let Some(g) = generations {
        if g < run.generation {
            return Err(ExperimentError::Config(format!(
                "checkpoint is already at generation {}, cannot stop at {g}",
                run.generation
            )));
        }
        run.config.generations = g;
        ctx.config.ga.generations = g;
        run.context = toml::to_string(&ctx).expect("contexts serialize");
    }
    let mut cfg = ctx.config.clone();
    let arm_dir = checkpoint.parent().unwrap_or(Path::new("."));
    cfg.experiment.output_dir = arm_dir.parent().unwrap_or(Path::new(".")).to_path_buf();
    if let Some(w) = workers {
        cfg.experiment.workers = w;
    }
    let res = load_resources(&cfg)?;
    let evaluator = evaluator(&cfg)?;
    let prepared = prepare_arm(&cfg, &res, ctx.arm, ctx.seed)?;
    progress(&format!("{} seed {}: resuming at generation {}", ctx.arm, ctx.seed, run.generation));
    let t = Instant::now();
    finish_ga(&mut run, prepared.task.as_ref(), &evaluator, &cfg, ctx.arm, ctx.seed, progress)?;
    let arms = summarize_dir(&cfg, &cfg.experiment.output_dir)?;
    write_text(&cfg.experiment.output_dir.join("summary.csv"), &format_summary_csv(&arms))?;
    let mut summary = SeedSummary::from_curve(ctx.arm, ctx.seed, &run.curve).expect("curve is non-empty");
    summary.ga_seconds = t.elapsed().as_secs_f64();
    Ok(summary)
}

/// Neuron, synapse and polarity counts of a connectome as a text table.
pub fn describe_connectome(c: &Connectome) -> String {
    let st = stats(c);
    let mut out = String::new();
    let mut row = |k: &str, v: String| {
        let _ = writeln!(out, "{k:<22}{v:>12}");
    };
    row("neurons", st.neuron_count.to_string());
    row("synapses", st.synapse_count.to_string());
    row("excitatory synapses", st.excitatory_count.to_string());
    row("inhibitory synapses", st.inhibitory_count.to_string());
    row("excitatory neurons", st.excitatory_neurons.to_string());
    row("inhibitory neurons", st.inhibitory_neurons.to_string());
    row("sparsity", format!("{:.6}", st.sparsity));
    for (class, count) in &st.class_counts {
        row(&format!("{class:?}").to_lowercase(), count.to_string());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuron::NeuronModelKind;

    fn tiny(dir: &Path) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::preset("desk_biophysical_realism").unwrap();
        cfg.experiment.output_dir = dir.to_path_buf();
        cfg.experiment.seeds = vec![1];
        cfg.experiment.arms = vec!["exact_connectome:artificial".parse().unwrap()];
        cfg.experiment.checkpoint_every = 2;
        cfg.network.segments = 1;
        cfg.network.substeps = 1;
        cfg.swimmer.episode_length = 20;
        cfg.ga = GaConfig { population_size: 6, elite_size: 2, generations: 3, ..cfg.ga };
        cfg.es = None;
        cfg
    }

    #[test]
    fn arms_build_for_every_architecture_and_task_shape() {
        let cfg = ExperimentConfig::preset("desk_architecture_statistics").unwrap();
        let res = load_resources(&cfg).unwrap();
        for a in Architecture::ALL {
            for n in [NeuronModelKind::Artificial, NeuronModelKind::Alif, NeuronModelKind::Izhikevich] {
                let p = prepare_arm(&cfg, &res, Arm::new(a, n), 0).unwrap();
                assert_eq!(p.spec.io.obs_dim, 10);
                assert_eq!(p.spec.io.action_dim, 5);
                assert_eq!(p.spec.neuron_count, 168);
            }
        }
        let p = prepare_arm(&cfg, &res, "exact_connectome:alif".parse().unwrap(), 0).unwrap();
        assert_eq!((p.spec.io.input_neurons.len(), p.spec.io.output_neurons.len()), (72, 96));
        assert_eq!(p.spec.edges.len(), res.connectome.synapses.len());
    }

    #[test]
    fn building_depends_only_on_the_seed() {
        let cfg = ExperimentConfig::preset("desk_architecture_statistics").unwrap();
        let res = load_resources(&cfg).unwrap();
        let arm: Arm = "stat_matched:artificial".parse().unwrap();
        let a = prepare_arm(&cfg, &res, arm, 4).unwrap();
        let b = prepare_arm(&cfg, &res, arm, 4).unwrap();
        let c = prepare_arm(&cfg, &res, arm, 5).unwrap();
        assert_eq!((a.spec.as_ref(), &a.genome), (b.spec.as_ref(), &b.genome));
        assert_ne!(a.spec.edges, c.spec.edges);
    }

    #[test]
    fn run_writes_artifacts_and_summary_matches_curves() {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tiny(tmp.path());
        let summary = run_experiment(&cfg).unwrap();
        let arm = cfg.experiment.arms[0];
        let curve = parse_curve_csv(&std::fs::read_to_string(curve_path(tmp.path(), arm, 1)).unwrap()).unwrap();
        assert_eq!(curve.len(), 4);
        assert!(checkpoint_path(tmp.path(), arm, 1).is_file());
        let written = std::fs::read_to_string(tmp.path().join("summary.csv")).unwrap();
        assert_eq!(written, format_summary_csv(&summarize_dir(&cfg, tmp.path()).unwrap()));
        assert_eq!(summary.arm(arm).unwrap().seeds[0].final_best, curve[3].best);
        let resolved = ExperimentConfig::load(&tmp.path().join("config.toml")).unwrap();
        assert_eq!(resolved, cfg);
        assert!(std::fs::read_to_string(tmp.path().join("timing.csv")).unwrap().starts_with(TIMING_HEADER));
    }

    #[test]
    fn resume_from_an_intermediate_checkpoint_matches() {
        let full = tempfile::tempdir().unwrap();
        let cfg = tiny(full.path());
        run_experiment(&cfg).unwrap();
        let arm = cfg.experiment.arms[0];

        let part = tempfile::tempdir().unwrap();
        let mut short = tiny(part.path());
        short.ga.generations = 2;
        run_experiment(&short).unwrap();
        let cp = checkpoint_path(part.path(), arm, 1);
        assert!(resume_experiment(&cp, None, Some(1), &mut |_| {}).is_err());
        resume_experiment(&cp, Some(2), Some(3), &mut |_| {}).unwrap();
        let read = |d: &Path| std::fs::read_to_string(curve_path(d, arm, 1)).unwrap();
        assert_eq!(read(part.path()), read(full.path()));
        let load = |d: &Path| checkpoint_load(&std::fs::read(checkpoint_path(d, arm, 1)).unwrap()).unwrap();
        let (a, b) = (load(part.path()), load(full.path()));
        assert_eq!((a.population, a.fitness), (b.population, b.fitness));
    }

    #[test]
    fn generation_zero_does_not_depend_on_the_generation_budget() {
        let mut rows = Vec::new();
        for generations in [0, 2] {
            let tmp = tempfile::tempdir().unwrap();
            let mut cfg = tiny(tmp.path());
            cfg.experiment.arms = vec!["exact_connectome:izhikevich".parse().unwrap()];
            cfg.ga.generations = generations;
            cfg.es = Some(EsConfig { population_size: 4, epochs: 2, ..EsConfig::desk() });
            let s = run_experiment(&cfg).unwrap();
            let seed = s.arms[0].seeds[0].clone();
            rows.push((seed.initial_mean, seed.initial_best));
        }
        assert_eq!(rows[0], rows[1]);
    }

    #[test]
    fn summary_rows_aggregate_over_seeds() {
        let arm: Arm = "fully_connected:alif".parse().unwrap();
        let row = |seed, best| SeedSummary {
            arm,
            seed,
            generations: 5,
            initial_mean: 0.0,
            initial_best: 1.0,
            final_best: best,
            final_mean: 0.5,
            pretrain_seconds: 0.0,
            ga_seconds: 0.0,
        };
        let a = ArmSummary { arm, seeds: vec![row(0, 1.0), row(1, 3.0)] };
        assert_eq!(a.final_best(), (2.0, 1.0));
        let csv = format_summary_csv(&[a]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("fully_connected:alif,mean,,"));
        assert!(lines[4].ends_with(&num(0.0)));
    }

    #[test]
    fn describe_lists_class_counts() {
        let c = generate_locomotion_circuit(6, &Default::default()).unwrap();
        let table = describe_connectome(&c);
        assert!(table.lines().any(|l| l.starts_with("motor") && l.ends_with(" 72")));
        assert!(table.lines().any(|l| l.starts_with("muscle") && l.ends_with(" 96")));
    }
}
