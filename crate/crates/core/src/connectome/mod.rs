//! Connectome graphs: typed neurons, signed synapses, validation and summary
//! statistics.
//!
//! A [`Connectome`] is a directed multigraph whose synapse signs are fixed by
//! the polarity of the presynaptic neuron (Dale's law). Graphs are immutable
//! once built and can be shared freely between evaluator threads.

mod generator;
mod io;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generator::{generate_locomotion_circuit, LocomotionConfig};
pub use io::{parse_connectome, serialize_connectome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NeuronClass {
    Sensory,
    Inter,
    Motor,
    Muscle,
}

impl NeuronClass {
    pub const ALL: [NeuronClass; 4] = [
        NeuronClass::Sensory,
        NeuronClass::Inter,
        NeuronClass::Motor,
        NeuronClass::Muscle,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subtype {
    DB,
    VB,
    DD,
    VD,
    MuscleDorsal,
    MuscleVentral,
    Other,
}

impl Subtype {
    /// Polarity forced by the motor-neuron class, if any.
    pub fn required_polarity(self) -> Option<Polarity> {
        match self {
            Subtype::DB | Subtype::VB => Some(Polarity::Excitatory),
            Subtype::DD | Subtype::VD => Some(Polarity::Inhibitory),
            Subtype::MuscleDorsal | Subtype::MuscleVentral | Subtype::Other => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Excitatory,
    Inhibitory,
}

impl Polarity {
    pub fn sign(self) -> Sign {
        match self {
            Polarity::Excitatory => Sign::Positive,
            Polarity::Inhibitory => Sign::Negative,
        }
    }
}

/// Fixed sign of a synapse. Serialized as the integers `1` and `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    #[inline]
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }

    #[inline]
    pub fn apply(self, magnitude: f64) -> f64 {
        match self {
            Sign::Positive => magnitude,
            Sign::Negative => -magnitude,
        }
    }

    pub fn polarity(self) -> Polarity {
        match self {
            Sign::Positive => Polarity::Excitatory,
            Sign::Negative => Polarity::Inhibitory,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(value: i8) -> Result<Self, Self::Error> {
        match value {
            1 => Ok(Sign::Positive),
            -1 => Ok(Sign::Negative),
            other => Err(format!("synapse sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(sign: Sign) -> i8 {
        match sign {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Neuron {
    pub id: usize,
    pub name: String,
    pub class: NeuronClass,
    pub subtype: Subtype,
    pub segment: u32,
    pub polarity: Polarity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Synapse {
    pub pre: usize,
    pub post: usize,
    pub sign: Sign,
    #[serde(default = "default_count")]
    pub count: u32,
    /// Self-loops are rejected unless the source marks them explicitly.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub self_loop: bool,
}

fn default_count() -> u32 {
    1
}

impl Synapse {
    pub fn new(pre: usize, post: usize, sign: Sign) -> Self {
        Synapse { pre, post, sign, count: 1, self_loop: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Connectome {
    pub neurons: Vec<Neuron>,
    pub synapses: Vec<Synapse>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

/// A single broken invariant, reported by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `neurons[position].id` is not equal to `position`.
    NonDenseId { position: usize, id: usize },
    SubtypePolarity { neuron: usize, subtype: Subtype, polarity: Polarity },
    DanglingEndpoint { synapse: usize, endpoint: usize, neuron_count: usize },
    DaleLaw { synapse: usize, pre: usize, polarity: Polarity, sign: Sign },
    UnmarkedSelfLoop { synapse: usize, neuron: usize },
    ZeroCount { synapse: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonDenseId { position, id } => {
                write!(f, "neuron ids must be dense 0..N-1: found id {id} at position {position}")
            }
            Violation::SubtypePolarity { neuron, subtype, polarity } => {
                write!(f, "neuron {neuron}: subtype {subtype:?} cannot be {polarity:?}")
            }
            Violation::DanglingEndpoint { synapse, endpoint, neuron_count } => write!(
                f,
                "synapse {synapse}: endpoint {endpoint} out of range (neuron count {neuron_count})"
            ),
            Violation::DaleLaw { synapse, pre, polarity, sign } => write!(
                f,
                "synapse {synapse}: sign {} contradicts {polarity:?} presynaptic neuron {pre} (Dale's law)",
                i8::from(*sign)
            ),
            Violation::UnmarkedSelfLoop { synapse, neuron } => {
                write!(f, "synapse {synapse}: self-loop on neuron {neuron} is not marked")
            }
            Violation::ZeroCount { synapse } => write!(f, "synapse {synapse}: count must be positive"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConnectomeError {
    #[error("connectome syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid connectome: {0}")]
    Invalid(Violation),
    #[error("invalid generator configuration: {0}")]
    Config(String),
}

/// Collects every invariant violation. Never panics.
pub fn validate(c: &Connectome) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let n = c.neurons.len();
    for (position, neuron) in c.neurons.iter().enumerate() {
        if neuron.id != position {
            out.push(Violation::NonDenseId { position, id: neuron.id });
        }
        if let Some(required) = neuron.subtype.required_polarity() {
            if required != neuron.polarity {
                out.push(Violation::SubtypePolarity {
                    neuron: neuron.id,
                    subtype: neuron.subtype,
                    polarity: neuron.polarity,
                });
            }
        }
    }
    for (idx, syn) in c.synapses.iter().enumerate() {
        let mut endpoints_ok = true;
        for endpoint in [syn.pre, syn.post] {
            if endpoint >= n {
                endpoints_ok = false;
                out.push(Violation::DanglingEndpoint { synapse: idx, endpoint, neuron_count: n });
            }
        }
        if syn.count == 0 {
            out.push(Violation::ZeroCount { synapse: idx });
        }
        if syn.pre == syn.post && !syn.self_loop {
            out.push(Violation::UnmarkedSelfLoop { synapse: idx, neuron: syn.pre });
        }
        if endpoints_ok {
            let polarity = c.neurons[syn.pre].polarity;
            if polarity.sign() != syn.sign {
                out.push(Violation::DaleLaw { synapse: idx, pre: syn.pre, polarity, sign: syn.sign });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectomeStats {
    pub neuron_count: usize,
    pub synapse_count: usize,
    pub excitatory_count: usize,
    pub inhibitory_count: usize,
    /// `synapse_count / (neuron_count * (neuron_count - 1))`, 0 for graphs with fewer than two neurons.
    pub sparsity: f64,
    pub class_counts: BTreeMap<NeuronClass, usize>,
    /// Presynaptic neurons (at least one outgoing synapse) by polarity.
    pub excitatory_neurons: usize,
    pub inhibitory_neurons: usize,
}

pub fn stats(c: &Connectome) -> ConnectomeStats {
    let n = c.neurons.len();
    let excitatory_count = c.synapses.iter().filter(|s| s.sign == Sign::Positive).count();
    let synapse_count = c.synapses.len();
    let mut class_counts: BTreeMap<NeuronClass, usize> =
        NeuronClass::ALL.iter().map(|&k| (k, 0)).collect();
    for neuron in &c.neurons {
        *class_counts.entry(neuron.class).or_default() += 1;
    }
    let mut presynaptic = vec![false; n];
    for syn in &c.synapses {
        presynaptic[syn.pre] = true;
    }
    let excitatory_neurons = c
        .neurons
        .iter()
        .filter(|nr| presynaptic[nr.id] && nr.polarity == Polarity::Excitatory)
        .count();
    let inhibitory_neurons = c
        .neurons
        .iter()
        .filter(|nr| presynaptic[nr.id] && nr.polarity == Polarity::Inhibitory)
        .count();
    let sparsity = if n >= 2 { synapse_count as f64 / (n * (n - 1)) as f64 } else { 0.0 };
    ConnectomeStats {
        neuron_count: n,
        synapse_count,
        excitatory_count,
        inhibitory_count: synapse_count - excitatory_count,
        sparsity,
        class_counts,
        excitatory_neurons,
        inhibitory_neurons,
    }
}

impl Connectome {
    pub fn class_ids(&self, class: NeuronClass) -> Vec<usize> {
        self.neurons.iter().filter(|n| n.class == class).map(|n| n.id).collect()
    }

    pub fn len(&self) -> usize {
        self.neurons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neurons.is_empty()
    }
}
