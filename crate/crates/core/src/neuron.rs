//! Single-step dynamics for the three neuron models.
//!
//! Time advances in 1 ms steps for the spiking models. Every update clamps
//! membrane values to `[-MEMBRANE_LIMIT, MEMBRANE_LIMIT]` before thresholding
//! so that extreme genomes produce bounded, finite activity.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MEMBRANE_LIMIT: f64 = 1.0e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeuronModelKind {
    Artificial,
    Alif,
    Izhikevich,
}

impl NeuronModelKind {
    pub fn is_spiking(self) -> bool {
        match self {
            NeuronModelKind::Artificial => false,
            NeuronModelKind::Alif | NeuronModelKind::Izhikevich => true,
        }
    }
}

/// Adaptive leaky integrate-and-fire constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlifParams {
    /// Membrane decay per step, in (0, 1).
    pub gamma: f64,
    /// Adaptation trace decay per step, in (0, 1).
    pub gamma_s: f64,
    /// Threshold increment per spike.
    pub beta: f64,
    pub v_th: f64,
}

impl Default for AlifParams {
    fn default() -> Self {
        AlifParams { gamma: (-1.0f64 / 20.0).exp(), gamma_s: (-1.0f64 / 10.0).exp(), beta: 0.5, v_th: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IzhikevichParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Spike cut-off in mV.
    pub v_peak: f64,
    /// Multiplies the synaptic/encoder input current.
    pub current_scale: f64,
    /// Multiplies the whole membrane increment of one step.
    pub dt_scale: f64,
}

impl Default for IzhikevichParams {
    fn default() -> Self {
        IzhikevichParams { a: 0.02, b: 0.25, c: -58.0, d: 0.0, v_peak: 30.0, current_scale: 20.0, dt_scale: 0.2 }
    }
}

/// A neuron model together with its constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NeuronModel {
    Artificial,
    Alif(AlifParams),
    Izhikevich(IzhikevichParams),
}

impl NeuronModel {
    pub fn default_for(kind: NeuronModelKind) -> Self {
        match kind {
            NeuronModelKind::Artificial => NeuronModel::Artificial,
            NeuronModelKind::Alif => NeuronModel::Alif(AlifParams::default()),
            NeuronModelKind::Izhikevich => NeuronModel::Izhikevich(IzhikevichParams::default()),
        }
    }

    pub fn kind(&self) -> NeuronModelKind {
        match self {
            NeuronModel::Artificial => NeuronModelKind::Artificial,
            NeuronModel::Alif(_) => NeuronModelKind::Alif,
            NeuronModel::Izhikevich(_) => NeuronModelKind::Izhikevich,
        }
    }

    /// Constants shared by all neurons and tuned by pretraining: `[gamma,
    /// gamma_s, beta]` for ALIF, `[a, b, c, d]` for Izhikevich.
    pub fn shared(&self) -> Vec<f64> {
        match self {
            NeuronModel::Artificial => Vec::new(),
            NeuronModel::Alif(p) => vec![p.gamma, p.gamma_s, p.beta],
            NeuronModel::Izhikevich(p) => vec![p.a, p.b, p.c, p.d],
        }
    }

    pub fn shared_count(&self) -> usize {
        match self {
            NeuronModel::Artificial => 0,
            NeuronModel::Alif(_) => 3,
            NeuronModel::Izhikevich(_) => 4,
        }
    }

    /// Inverse of [`NeuronModel::shared`]. Panics on a length mismatch.
    pub fn set_shared(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.shared_count(), "shared constant count");
        match self {
            NeuronModel::Artificial => {}
            NeuronModel::Alif(p) => [p.gamma, p.gamma_s, p.beta] = [values[0], values[1], values[2]],
            NeuronModel::Izhikevich(p) => [p.a, p.b, p.c, p.d] = [values[0], values[1], values[2], values[3]],
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum NeuronError {
    #[error("non-finite {what} at neuron {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("input has {got} entries, state has {expected} neurons")]
    Dimension { expected: usize, got: usize },
}

/// Runtime state of a population of neurons.
#[derive(Debug, Clone, PartialEq)]
pub struct NeuronState {
    /// Membrane potential.
    pub v: Vec<f64>,
    /// Izhikevich recovery variable or ALIF adaptation trace.
    pub u: Vec<f64>,
    /// Spike emitted during the last step.
    pub spikes: Vec<bool>,
    /// ReLU activation (artificial model only).
    pub act: Vec<f64>,
}

impl NeuronState {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Output seen by postsynaptic neurons: the activation for artificial
    /// neurons, 0/1 for spiking ones.
    #[inline]
    pub fn output(&self, kind: NeuronModelKind, i: usize) -> f64 {
        match kind {
            NeuronModelKind::Artificial => self.act[i],
            NeuronModelKind::Alif | NeuronModelKind::Izhikevich => {
                if self.spikes[i] {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Advances every neuron by one step in place.
    pub fn advance(&mut self, model: &NeuronModel, input: &[f64]) -> Result<(), NeuronError> {
        match model {
            NeuronModel::Artificial => {}
            NeuronModel::Alif(_) => {
                check_finite("membrane potential", &self.v)?;
                check_finite("adaptation trace", &self.u)?;
            }
            NeuronModel::Izhikevich(_) => {
                check_finite("membrane potential", &self.v)?;
                check_finite("recovery variable", &self.u)?;
            }
        }
        self.advance_from_finite(model, input)
    }

    /// [`NeuronState::advance`] for a state known to be finite, e.g. one
    /// produced by [`reset_state`] and earlier steps: finite inputs and
    /// clamping keep it finite, so only the input is checked.
    pub(crate) fn advance_from_finite(&mut self, model: &NeuronModel, input: &[f64]) -> Result<(), NeuronError> {
        if input.len() != self.len() {
            return Err(NeuronError::Dimension { expected: self.len(), got: input.len() });
        }
        check_finite("input", input)?;
        match model {
            NeuronModel::Artificial => {
                for (a, &x) in self.act.iter_mut().zip(input) {
                    *a = x.clamp(0.0, MEMBRANE_LIMIT);
                }
            }
            NeuronModel::Alif(p) => {
                for i in 0..self.v.len() {
                    let v = clamp(p.gamma * self.v[i] + input[i]);
                    let spike = v >= p.v_th + self.u[i];
                    self.v[i] = if spike { 0.0 } else { v };
                    self.u[i] = p.gamma_s * self.u[i] + if spike { p.beta } else { 0.0 };
                    self.spikes[i] = spike;
                }
            }
            NeuronModel::Izhikevich(p) => {
                for i in 0..self.v.len() {
                    let (v, u) = (self.v[i], self.u[i]);
                    let dv = 0.04 * v * v + 5.0 * v + 140.0 - u + p.current_scale * input[i];
                    let v_next = clamp(v + p.dt_scale * dv);
                    let spike = v_next >= p.v_peak;
                    if spike {
                        self.v[i] = p.c;
                        self.u[i] = clamp(u + p.d);
                    } else {
                        self.v[i] = v_next;
                        self.u[i] = clamp(u + p.a * (p.b * v - u));
                    }
                    self.spikes[i] = spike;
                }
            }
        }
        Ok(())
    }
}

#[inline]
fn clamp(x: f64) -> f64 {
    x.clamp(-MEMBRANE_LIMIT, MEMBRANE_LIMIT)
}

fn check_finite(what: &'static str, xs: &[f64]) -> Result<(), NeuronError> {
    match xs.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(NeuronError::NonFinite { what, index }),
        None => Ok(()),
    }
}

/// Resting state: zeros for the artificial and ALIF models, `v = c`, `u = b*c`
/// for Izhikevich.
pub fn reset_state(model: &NeuronModel, n: usize) -> NeuronState {
    let (v, u) = match model {
        NeuronModel::Artificial | NeuronModel::Alif(_) => (0.0, 0.0),
        NeuronModel::Izhikevich(p) => (p.c, p.b * p.c),
    };
    NeuronState { v: vec![v; n], u: vec![u; n], spikes: vec![false; n], act: vec![0.0; n] }
}

pub fn artificial_step(weighted_input: &[f64]) -> Result<Vec<f64>, NeuronError> {
    let mut state = reset_state(&NeuronModel::Artificial, weighted_input.len());
    state.advance(&NeuronModel::Artificial, weighted_input)?;
    Ok(state.act)
}

pub fn alif_step(
    state: &NeuronState,
    params: &AlifParams,
    weighted_input: &[f64],
) -> Result<(NeuronState, Vec<bool>), NeuronError> {
    let mut next = state.clone();
    next.advance(&NeuronModel::Alif(*params), weighted_input)?;
    let spikes = next.spikes.clone();
    Ok((next, spikes))
}

pub fn izhikevich_step(
    state: &NeuronState,
    params: &IzhikevichParams,
    weighted_input: &[f64],
) -> Result<(NeuronState, Vec<bool>), NeuronError> {
    let mut next = state.clone();
    next.advance(&NeuronModel::Izhikevich(*params), weighted_input)?;
    let spikes = next.spikes.clone();
    Ok((next, spikes))
}
