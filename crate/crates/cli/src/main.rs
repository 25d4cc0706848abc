use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use nema_core::connectome::{generate_locomotion_circuit, parse_connectome, serialize_connectome, LocomotionConfig};
use nema_core::experiment::{describe_connectome, resume_experiment, run_experiment_with, ExperimentConfig};

/// Evolve connectome-derived policies on the swimmer and MNIST tasks.
#[derive(Parser)]
#[command(name = "nema", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a TOML file or a preset name (e.g. desk_limitations).
    Run {
        config: String,
        /// Suppress per-generation progress on standard error.
        #[arg(long)]
        quiet: bool,
    },
    /// Print neuron, synapse and polarity counts of a connectome file.
    Describe { connectome: PathBuf },
    /// Write the generated locomotion circuit with the default per-segment layout.
    Generate { segments: usize, out: PathBuf },
    /// Continue a run from one of its checkpoints.
    Resume {
        checkpoint: PathBuf,
        /// Train to this generation instead of the configured count.
        #[arg(long)]
        generations: Option<u64>,
        #[arg(long)]
        quiet: bool,
    },
    /// Print the fully resolved TOML of a config file or preset.
    Show { config: String },
}

fn workers_override() -> Result<Option<usize>> {
    match std::env::var("NEMA_WORKERS") {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("NEMA_WORKERS={v:?} is not a count"))?;
            if n == 0 {
                bail!("NEMA_WORKERS must be at least 1");
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn reporter(quiet: bool) -> impl FnMut(&str) {
    move |line: &str| {
        if !quiet {
            eprintln!("{line}");
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, quiet } => {
            let mut cfg = ExperimentConfig::resolve(&config)?;
            if let Some(n) = workers_override()? {
                cfg.experiment.workers = n;
            }
            let summary = run_experiment_with(&cfg, &mut reporter(quiet))?;
            for arm in &summary.arms {
                let (best, best_sd) = arm.final_best();
                let (init, init_sd) = arm.initial_mean();
                println!(
                    "{:<34} initial mean {init:>10.4} ± {init_sd:<8.4} final best {best:>10.4} ± {best_sd:.4}",
                    arm.arm.to_string()
                );
            }
            println!("wrote {} in {:.1} s", summary.output_dir.display(), summary.wall_seconds);
        }
        Command::Describe { connectome } => {
            let text = std::fs::read_to_string(&connectome)
                .with_context(|| format!("cannot read {}", connectome.display()))?;
            let c = parse_connectome(&text)?;
            print!("{}", describe_connectome(&c));
        }
        Command::Generate { segments, out } => {
            let c = generate_locomotion_circuit(segments, &LocomotionConfig::default())?;
            std::fs::write(&out, serialize_connectome(&c)).with_context(|| format!("cannot write {}", out.display()))?;
        }
        Command::Resume { checkpoint, generations, quiet } => {
            let s = resume_experiment(&checkpoint, workers_override()?, generations, &mut reporter(quiet))?;
            println!(
                "{} seed {}: generation {} best {:.6} mean {:.6}",
                s.arm, s.seed, s.generations, s.final_best, s.final_mean
            );
        }
        Command::Show { config } => print!("{}", ExperimentConfig::resolve(&config)?.to_toml()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
