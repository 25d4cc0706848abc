//! Connectome-derived recurrent networks, neuron models, neuroevolution and
//! the tasks used to evaluate them.

pub mod connectome;
pub mod env;
pub mod evolution;
pub mod experiment;
pub mod network;
pub mod neuron;
