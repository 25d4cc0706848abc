//! Compiling connectomes and synthetic architectures into executable
//! recurrent policies.
//!
//! A [`NetworkSpec`] holds the fixed topology and I/O wiring; a [`Genome`]
//! holds everything evolution is allowed to touch. Observations enter through
//! an affine+tanh encoder onto the input neurons, the recurrent core runs
//! `substeps` neural steps per control step, and an affine+tanh decoder reads
//! the output neurons.

mod build;
mod forward;
mod genome;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connectome::Sign;
use crate::neuron::{NeuronError, NeuronModelKind};

pub use build::{
    build_exact, build_fully_connected, build_random_sparse, build_random_sparse_with, build_stat_matched,
    hidden_split, InitWeights, ENC_DEC_INIT,
};
pub use forward::{forward_episode_step, CompiledNetwork, NetworkState};
pub use genome::{effective_weight, Affine, Genome, ParamGroup, WeightCoding, LOG_WEIGHT_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeWindow {
    /// Spike count over the substep window divided by `substeps`.
    SpikeCount,
    /// Activation after the last substep.
    LastActivation,
}

impl DecodeWindow {
    pub fn for_model(kind: NeuronModelKind) -> Self {
        if kind.is_spiking() {
            DecodeWindow::SpikeCount
        } else {
            DecodeWindow::LastActivation
        }
    }
}

/// Dimensions of a policy without neuron assignments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IoShape {
    pub obs_dim: usize,
    pub action_dim: usize,
    pub substeps: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IoSpec {
    pub obs_dim: usize,
    pub action_dim: usize,
    pub input_neurons: Vec<usize>,
    pub output_neurons: Vec<usize>,
    pub substeps: usize,
    pub decode: DecodeWindow,
}

impl IoSpec {
    pub fn new(shape: IoShape, input_neurons: Vec<usize>, output_neurons: Vec<usize>, kind: NeuronModelKind) -> Self {
        IoSpec {
            obs_dim: shape.obs_dim,
            action_dim: shape.action_dim,
            input_neurons,
            output_neurons,
            substeps: shape.substeps,
            decode: DecodeWindow::for_model(kind),
        }
    }

    pub fn shape(&self) -> IoShape {
        IoShape { obs_dim: self.obs_dim, action_dim: self.action_dim, substeps: self.substeps }
    }

    fn check(&self, neuron_count: usize, kind: NeuronModelKind) -> Result<(), NetworkError> {
        if self.input_neurons.is_empty() || self.output_neurons.is_empty() {
            return Err(NetworkError::Build("input and output neuron lists must be non-empty".into()));
        }
        if let Some(&id) = self.input_neurons.iter().chain(&self.output_neurons).find(|&&id| id >= neuron_count) {
            return Err(NetworkError::Build(format!(
                "I/O references neuron {id} but the network has {neuron_count} neurons"
            )));
        }
        if self.substeps == 0 {
            return Err(NetworkError::Build("substeps must be at least 1".into()));
        }
        if self.decode != DecodeWindow::for_model(kind) {
            return Err(NetworkError::Build(format!("{:?} decoding does not match the {kind:?} model", self.decode)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub pre: usize,
    pub post: usize,
    pub sign: Sign,
    pub count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Provenance {
    ExactConnectome,
    StatMatched,
    FullyConnected,
    RandomSparse { density: f64, excitatory_ratio: f64 },
}

/// Fixed topology of a compiled network. Edge `i` is driven by gene `i` of the
/// genome's synapse weights.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub neuron_count: usize,
    pub edges: Vec<Edge>,
    pub io: IoSpec,
    pub provenance: Provenance,
    /// Hidden layer sizes for the layered baselines.
    pub hidden: Option<(usize, usize)>,
}

/// Edge counts of a compiled topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopologyCounts {
    pub neuron_count: usize,
    pub synapse_count: usize,
    pub excitatory_count: usize,
    pub inhibitory_count: usize,
}

impl NetworkSpec {
    pub fn counts(&self) -> TopologyCounts {
        let excitatory_count = self.edges.iter().filter(|e| e.sign == Sign::Positive).count();
        TopologyCounts {
            neuron_count: self.neuron_count,
            synapse_count: self.edges.len(),
            excitatory_count,
            inhibitory_count: self.edges.len() - excitatory_count,
        }
    }

    /// Every presynaptic neuron uses a single sign on all its outgoing edges.
    pub fn obeys_dale(&self) -> bool {
        let mut seen: Vec<Option<Sign>> = vec![None; self.neuron_count];
        self.edges.iter().all(|e| *seen[e.pre].get_or_insert(e.sign) == e.sign)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("network build error: {0}")]
    Build(String),
    #[error("infeasible topology: {0}")]
    Infeasible(String),
    #[error("{what}: expected {expected} entries, got {got}")]
    Dimension { what: &'static str, expected: usize, got: usize },
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error(transparent)]
    Neuron(#[from] NeuronError),
}
