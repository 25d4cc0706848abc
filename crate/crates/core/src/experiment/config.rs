use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ExperimentError;
use crate::connectome::LocomotionConfig;
use crate::env::SwimmerConfig;
use crate::evolution::{EsConfig, GaConfig};
use crate::neuron::{AlifParams, IzhikevichParams, NeuronModel, NeuronModelKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    BiophysicalRealism,
    ArchitectureStatistics,
    Limitations,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Architecture {
    ExactConnectome,
    StatMatched,
    FullyConnected,
    RandomSparse,
}

impl Architecture {
    pub const ALL: [Architecture; 4] =
        [Architecture::ExactConnectome, Architecture::StatMatched, Architecture::FullyConnected, Architecture::RandomSparse];

    pub fn name(self) -> &'static str {
        match self {
            Architecture::ExactConnectome => "exact_connectome",
            Architecture::StatMatched => "stat_matched",
            Architecture::FullyConnected => "fully_connected",
            Architecture::RandomSparse => "random_sparse",
        }
    }
}

fn model_name(kind: NeuronModelKind) -> &'static str {
    match kind {
        NeuronModelKind::Artificial => "artificial",
        NeuronModelKind::Alif => "alif",
        NeuronModelKind::Izhikevich => "izhikevich",
    }
}

/// One network variant of an experiment, written `architecture:neuron`,
/// e.g. `exact_connectome:alif`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arm {
    pub architecture: Architecture,
    pub neuron: NeuronModelKind,
}

impl Arm {
    pub fn new(architecture: Architecture, neuron: NeuronModelKind) -> Self {
        Arm { architecture, neuron }
    }

    /// Directory name of the arm's artifacts.
    pub fn slug(&self) -> String {
        format!("{}-{}", self.architecture.name(), model_name(self.neuron))
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.architecture.name(), model_name(self.neuron))
    }
}

impl FromStr for Arm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, n) = s.split_once(':').ok_or_else(|| format!("arm `{s}` is not of the form architecture:neuron"))?;
        let architecture = Architecture::ALL
            .into_iter()
            .find(|x| x.name() == a.trim())
            .ok_or_else(|| format!("unknown architecture `{a}` in arm `{s}`"))?;
        let neuron = [NeuronModelKind::Artificial, NeuronModelKind::Alif, NeuronModelKind::Izhikevich]
            .into_iter()
            .find(|k| model_name(*k) == n.trim())
            .ok_or_else(|| format!("unknown neuron model `{n}` in arm `{s}`"))?;
        Ok(Arm { architecture, neuron })
    }
}

impl Serialize for Arm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Arm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    pub kind: ExperimentKind,
    pub arms: Vec<Arm>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Generations between checkpoints; the final generation is always saved.
    #[serde(default = "default_checkpoint_every")]
    pub checkpoint_every: u64,
}

fn default_workers() -> usize {
    1
}

fn default_checkpoint_every() -> u64 {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    /// Connectome file; the generated locomotion circuit is used when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connectome: Option<PathBuf>,
    pub segments: usize,
    pub db: usize,
    pub vb: usize,
    pub dd: usize,
    pub vd: usize,
    pub dorsal_muscles: usize,
    pub ventral_muscles: usize,
    pub substeps: usize,
}

impl Default for NetworkSection {
    fn default() -> Self {
        let c = LocomotionConfig::default();
        NetworkSection {
            connectome: None,
            segments: 6,
            db: c.db,
            vb: c.vb,
            dd: c.dd,
            vd: c.vd,
            dorsal_muscles: c.dorsal_muscles,
            ventral_muscles: c.ventral_muscles,
            substeps: 10,
        }
    }
}

impl NetworkSection {
    pub fn circuit(&self) -> LocomotionConfig {
        LocomotionConfig {
            db: self.db,
            vb: self.vb,
            dd: self.dd,
            vd: self.vd,
            dorsal_muscles: self.dorsal_muscles,
            ventral_muscles: self.ventral_muscles,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Swimmer,
    Mnist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSection {
    pub kind: TaskKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MnistSection {
    /// Directory holding `train-images-idx3-ubyte` and `train-labels-idx1-ubyte`.
    pub data_dir: PathBuf,
    pub subset_size: usize,
    pub subset_seed: u64,
}

impl Default for MnistSection {
    fn default() -> Self {
        MnistSection { data_dir: PathBuf::from("data/mnist"), subset_size: 1000, subset_seed: 0 }
    }
}

impl MnistSection {
    pub const IMAGES: &'static str = "train-images-idx3-ubyte";
    pub const LABELS: &'static str = "train-labels-idx1-ubyte";

    pub fn images_path(&self) -> PathBuf {
        self.data_dir.join(Self::IMAGES)
    }

    pub fn labels_path(&self) -> PathBuf {
        self.data_dir.join(Self::LABELS)
    }
}

/// Full experiment description, read from and written as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub network: NetworkSection,
    pub task: TaskSection,
    #[serde(default)]
    pub swimmer: SwimmerConfig,
    #[serde(default)]
    pub mnist: MnistSection,
    #[serde(default)]
    pub alif: AlifParams,
    #[serde(default)]
    pub izhikevich: IzhikevichParams,
    pub ga: GaConfig,
    /// Evolution-strategies pretraining; skipped when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub es: Option<EsConfig>,
}

pub const PRESETS: [&str; 6] = [
    "desk_biophysical_realism",
    "desk_architecture_statistics",
    "desk_limitations",
    "full_biophysical_realism",
    "full_architecture_statistics",
    "full_limitations",
];

fn arms(list: &[(Architecture, NeuronModelKind)]) -> Vec<Arm> {
    list.iter().map(|&(a, n)| Arm::new(a, n)).collect()
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment configs serialize")
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn preset(name: &str) -> Option<Self> {
        use Architecture::*;
        use NeuronModelKind::*;
        let (full, kind) = match name.split_once('_')? {
            ("desk", rest) => (false, rest),
            ("full", rest) => (true, rest),
            _ => return None,
        };
        let base = |kind: ExperimentKind, arms: Vec<Arm>, seeds: u64, task: TaskKind, ga: GaConfig| ExperimentConfig {
            experiment: ExperimentSection {
                name: name.to_string(),
                kind,
                arms,
                seeds: (0..seeds).collect(),
                output_dir: PathBuf::from("runs").join(name),
                workers: default_workers(),
                checkpoint_every: default_checkpoint_every(),
            },
            network: NetworkSection::default(),
            task: TaskSection { kind: task },
            swimmer: SwimmerConfig::default(),
            mnist: MnistSection::default(),
            alif: AlifParams::default(),
            izhikevich: IzhikevichParams::default(),
            ga: if full { ga } else { ga.desk() },
            es: Some(if full { EsConfig::full() } else { EsConfig::desk() }),
        };
        let mut cfg = match kind {
            "biophysical_realism" => base(
                ExperimentKind::BiophysicalRealism,
                arms(&[(ExactConnectome, Artificial), (ExactConnectome, Alif), (ExactConnectome, Izhikevich)]),
                5,
                TaskKind::Swimmer,
                GaConfig::biophysical_realism(),
            ),
            "architecture_statistics" => base(
                ExperimentKind::ArchitectureStatistics,
                arms(&[
                    (ExactConnectome, Artificial),
                    (StatMatched, Artificial),
                    (FullyConnected, Artificial),
                    (RandomSparse, Artificial),
                ]),
                5,
                TaskKind::Swimmer,
                GaConfig::architecture_statistics(),
            ),
            "limitations" => base(
                ExperimentKind::Limitations,
                arms(&[(ExactConnectome, Artificial), (FullyConnected, Artificial)]),
                3,
                TaskKind::Mnist,
                GaConfig::limitations(),
            ),
            _ => return None,
        };
        if !full {
            cfg.tune_desk();
        }
        Some(cfg)
    }

    fn tune_desk(&mut self) {
        match self.experiment.kind {
            ExperimentKind::ArchitectureStatistics => {
                self.network.substeps = 2;
            }
            ExperimentKind::Limitations => {
                self.network.substeps = 2;
            }
            _ => {}
        }
    }

    /// Reads a TOML file, or a preset when `name_or_path` names one.
    pub fn resolve(name_or_path: &str) -> Result<Self, ExperimentError> {
        match Self::preset(name_or_path) {
            Some(cfg) => Ok(cfg),
            None => Self::load(Path::new(name_or_path)),
        }
    }

    pub fn model(&self, kind: NeuronModelKind) -> NeuronModel {
        match kind {
            NeuronModelKind::Artificial => NeuronModel::Artificial,
            NeuronModelKind::Alif => NeuronModel::Alif(self.alif),
            NeuronModelKind::Izhikevich => NeuronModel::Izhikevich(self.izhikevich),
        }
    }

    /// Checks everything that can be checked before any compute starts.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |m: String| Err(ExperimentError::Config(m));
        let e = &self.experiment;
        if e.seeds.is_empty() {
            return fail("`experiment.seeds` must not be empty".into());
        }
        if e.arms.is_empty() {
            return fail("`experiment.arms` must not be empty".into());
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(s) = e.seeds.iter().find(|s| !seen.insert(**s)) {
            return fail(format!("seed {s} is listed twice"));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(a) = e.arms.iter().find(|a| !seen.insert(**a)) {
            return fail(format!("arm `{a}` is listed twice"));
        }
        if e.workers == 0 {
            return fail("`experiment.workers` must be at least 1".into());
        }
        if e.checkpoint_every == 0 {
            return fail("`experiment.checkpoint_every` must be at least 1".into());
        }
        if self.network.substeps == 0 {
            return fail("`network.substeps` must be at least 1".into());
        }
        match &self.network.connectome {
            Some(path) if !path.is_file() => {
                return fail(format!("connectome file {} does not exist", path.display()));
            }
            Some(_) => {}
            None if self.network.segments == 0 => return fail("`network.segments` must be at least 1".into()),
            None => {}
        }
        match self.task.kind {
            TaskKind::Swimmer => self.swimmer.validate().map_err(|e| ExperimentError::Config(e.to_string()))?,
            TaskKind::Mnist => {
                for p in [self.mnist.images_path(), self.mnist.labels_path()] {
                    if !p.is_file() {
                        return fail(format!("MNIST file {} does not exist", p.display()));
                    }
                }
                if self.mnist.subset_size == 0 {
                    return fail("`mnist.subset_size` must be at least 1".into());
                }
            }
        }
        let evolution = |r: Result<(), crate::evolution::EvolutionError>| r.map_err(|e| ExperimentError::Config(e.to_string()));
        evolution(self.ga.validate())?;
        if let Some(es) = &self.es {
            evolution(es.validate())?;
        }
        Ok(())
    }
}
