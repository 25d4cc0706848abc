use super::{Affine, DecodeWindow, Genome, NetworkError, NetworkSpec};
use crate::neuron::{reset_state, NeuronModel, NeuronModelKind, NeuronState};

/// A network spec and genome fused into a presynaptic CSR layout with
/// effective weights, ready for repeated rollouts.
#[derive(Debug, Clone)]
pub struct CompiledNetwork {
    neuron_count: usize,
    model: NeuronModel,
    kind: NeuronModelKind,
    row_start: Vec<usize>,
    post: Vec<usize>,
    weight: Vec<f64>,
    input_neurons: Vec<usize>,
    output_neurons: Vec<usize>,
    substeps: usize,
    decode: DecodeWindow,
    enc: Affine,
    dec: Affine,
}

/// Runtime state of one rollout plus scratch buffers.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub neurons: NeuronState,
    current: Vec<f64>,
    encoded: Vec<f64>,
    features: Vec<f64>,
}

impl NetworkState {
    pub fn new(model: &NeuronModel, neuron_count: usize, inputs: usize, outputs: usize) -> Self {
        NetworkState {
            neurons: reset_state(model, neuron_count),
            current: vec![0.0; neuron_count],
            encoded: vec![0.0; inputs],
            features: vec![0.0; outputs],
        }
    }
}

impl CompiledNetwork {
    pub fn new(spec: &NetworkSpec, genome: &Genome) -> Result<Self, NetworkError> {
        let io = &spec.io;
        let expect = |what, expected, got| {
            if expected == got {
                Ok(())
            } else {
                Err(NetworkError::Dimension { what, expected, got })
            }
        };
        expect("synapse genes", spec.edges.len(), genome.weights.len())?;
        expect("encoder inputs", io.obs_dim, genome.enc.inputs)?;
        expect("encoder outputs", io.input_neurons.len(), genome.enc.outputs)?;
        expect("decoder inputs", io.output_neurons.len(), genome.dec.inputs)?;
        expect("decoder outputs", io.action_dim, genome.dec.outputs)?;
        if io.decode != DecodeWindow::for_model(genome.model.kind()) {
            return Err(NetworkError::Build(format!(
                "{:?} decoding does not match the {:?} model",
                io.decode,
                genome.model.kind()
            )));
        }

        let n = spec.neuron_count;
        let mut row_start = vec![0usize; n + 1];
        for e in &spec.edges {
            row_start[e.pre + 1] += 1;
        }
        for i in 0..n {
            row_start[i + 1] += row_start[i];
        }
        let mut fill = row_start.clone();
        let mut post = vec![0; spec.edges.len()];
        let mut weight = vec![0.0; spec.edges.len()];
        for (i, e) in spec.edges.iter().enumerate() {
            let slot = fill[e.pre];
            fill[e.pre] += 1;
            post[slot] = e.post;
            weight[slot] = genome.synapse_weight(i) * e.count as f64;
        }
        if weight.iter().any(|w| !w.is_finite()) {
            return Err(NetworkError::NonFinite("synaptic weight"));
        }

        Ok(CompiledNetwork {
            neuron_count: n,
            model: genome.model,
            kind: genome.model.kind(),
            row_start,
            post,
            weight,
            input_neurons: io.input_neurons.clone(),
            output_neurons: io.output_neurons.clone(),
            substeps: io.substeps,
            decode: io.decode,
            enc: genome.enc.clone(),
            dec: genome.dec.clone(),
        })
    }

    pub fn obs_dim(&self) -> usize {
        self.enc.inputs
    }

    pub fn action_dim(&self) -> usize {
        self.dec.outputs
    }

    pub fn reset(&self) -> NetworkState {
        NetworkState::new(&self.model, self.neuron_count, self.input_neurons.len(), self.output_neurons.len())
    }

    /// One control step: encode `obs`, run `substeps` neural steps, decode into
    /// `action`.
    ///
    /// Synaptic input at each neural step is computed from the outputs of the
    /// previous step, so every synapse carries a one-step delay.
    pub fn step(&self, state: &mut NetworkState, obs: &[f64], action: &mut [f64]) -> Result<(), NetworkError> {
        if obs.len() != self.obs_dim() {
            return Err(NetworkError::Dimension { what: "observation", expected: self.obs_dim(), got: obs.len() });
        }
        if action.len() != self.action_dim() {
            return Err(NetworkError::Dimension { what: "action", expected: self.action_dim(), got: action.len() });
        }
        if state.neurons.len() != self.neuron_count || state.encoded.len() != self.input_neurons.len() {
            return Err(NetworkError::Dimension {
                what: "network state",
                expected: self.neuron_count,
                got: state.neurons.len(),
            });
        }
        if obs.iter().any(|x| !x.is_finite()) {
            return Err(NetworkError::NonFinite("observation"));
        }

        self.enc.apply(obs, &mut state.encoded);
        for x in &mut state.encoded {
            *x = x.tanh();
        }
        state.features.fill(0.0);

        for _ in 0..self.substeps {
            state.current.fill(0.0);
            for pre in 0..self.neuron_count {
                let out = state.neurons.output(self.kind, pre);
                if out != 0.0 {
                    let (lo, hi) = (self.row_start[pre], self.row_start[pre + 1]);
                    for (&post, &w) in self.post[lo..hi].iter().zip(&self.weight[lo..hi]) {
                        state.current[post] += w * out;
                    }
                }
            }
            for (&id, &x) in self.input_neurons.iter().zip(&state.encoded) {
                state.current[id] += x;
            }
            state.neurons.advance_from_finite(&self.model, &state.current)?;
            if self.decode == DecodeWindow::SpikeCount {
                for (f, &id) in state.features.iter_mut().zip(&self.output_neurons) {
                    if state.neurons.spikes[id] {
                        *f += 1.0;
                    }
                }
            }
        }

        match self.decode {
            DecodeWindow::SpikeCount => {
                let scale = 1.0 / self.substeps as f64;
                for f in &mut state.features {
                    *f *= scale;
                }
            }
            DecodeWindow::LastActivation => {
                for (f, &id) in state.features.iter_mut().zip(&self.output_neurons) {
                    *f = state.neurons.act[id];
                }
            }
        }
        self.dec.apply(&state.features, action);
        for a in action.iter_mut() {
            *a = a.tanh();
        }
        if action.iter().any(|a| !a.is_finite()) {
            return Err(NetworkError::NonFinite("action"));
        }
        Ok(())
    }

    /// Normalized decoder inputs from the last control step.
    pub fn features<'a>(&self, state: &'a NetworkState) -> &'a [f64] {
        &state.features
    }
}

/// Pure form of [`CompiledNetwork::step`] that compiles on every call.
pub fn forward_episode_step(
    spec: &NetworkSpec,
    genome: &Genome,
    state: &NetworkState,
    obs: &[f64],
) -> Result<(NetworkState, Vec<f64>), NetworkError> {
    let net = CompiledNetwork::new(spec, genome)?;
    let mut next = state.clone();
    let mut action = vec![0.0; net.action_dim()];
    net.step(&mut next, obs, &mut action)?;
    Ok((next, action))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectome::{generate_locomotion_circuit, LocomotionConfig, NeuronClass, Sign};
    use crate::network::{build_exact, build_fully_connected, Edge, InitWeights, IoShape, IoSpec, Provenance, WeightCoding};
    use crate::neuron::{AlifParams, IzhikevichParams};
    use std::sync::Arc;

    fn single_neuron(model: NeuronModel, enc: f64, dec: f64) -> (NetworkSpec, Genome) {
        let shape = IoShape { obs_dim: 1, action_dim: 1, substeps: 1 };
        let io = IoSpec::new(shape, vec![0], vec![0], model.kind());
        let spec = NetworkSpec { neuron_count: 1, edges: vec![], io, provenance: Provenance::FullyConnected, hidden: None };
        let genome = Genome {
            coding: WeightCoding::Linear,
            weights: vec![],
            signs: Arc::from(Vec::new()),
            enc: Affine { inputs: 1, outputs: 1, weights: vec![enc], bias: vec![0.0] },
            dec: Affine { inputs: 1, outputs: 1, weights: vec![dec], bias: vec![0.0] },
            model,
        };
        (spec, genome)
    }

    #[test]
    fn single_artificial_neuron_composes_the_pipeline() {
        let (spec, genome) = single_neuron(NeuronModel::Artificial, 1.0, 1.0);
        let net = CompiledNetwork::new(&spec, &genome).unwrap();
        for obs in [-2.0, -0.3, 0.0, 0.7, 1.9] {
            let (_, action) = forward_episode_step(&spec, &genome, &net.reset(), &[obs]).unwrap();
            let expected = (obs.tanh().max(0.0)).tanh();
            assert_eq!(action[0], expected);
        }
        let (spec, genome) = single_neuron(NeuronModel::Artificial, 0.5, -2.0);
        let (_, action) = forward_episode_step(&spec, &genome, &net.reset(), &[1.5]).unwrap();
        assert_eq!(action[0], (-2.0 * (1.5f64 * 0.5).tanh()).tanh());
    }

    fn circuit(model: NeuronModel) -> (NetworkSpec, Genome) {
        let c = generate_locomotion_circuit(6, &LocomotionConfig::default()).unwrap();
        let shape = IoShape { obs_dim: 10, action_dim: 5, substeps: 10 };
        let io = IoSpec::new(shape, c.class_ids(NeuronClass::Motor), c.class_ids(NeuronClass::Muscle), model.kind());
        build_exact(&c, model, io, InitWeights::for_model(model.kind()), 11).unwrap()
    }

    #[test]
    fn zero_obs_with_zero_biases_gives_zero_action() {
        let (spec, mut genome) = circuit(NeuronModel::Alif(AlifParams::default()));
        genome.enc.bias.fill(0.0);
        genome.dec.bias.fill(0.0);
        let net = CompiledNetwork::new(&spec, &genome).unwrap();
        let (_, action) = forward_episode_step(&spec, &genome, &net.reset(), &[0.0; 10]).unwrap();
        assert_eq!(action, vec![0.0; 5]);
    }

    #[test]
    fn spike_count_features_are_normalized() {
        for model in [NeuronModel::Alif(AlifParams::default()), NeuronModel::Izhikevich(IzhikevichParams::default())] {
            let (spec, mut genome) = circuit(model);
            genome.enc.weights.iter_mut().for_each(|w| *w *= 20.0);
            genome.enc.bias.fill(2.0);
            let net = CompiledNetwork::new(&spec, &genome).unwrap();
            let mut state = net.reset();
            let mut action = [0.0; 5];
            let mut any_spike = false;
            for t in 0..50 {
                let obs: Vec<f64> = (0..10).map(|i| ((t * 7 + i) as f64).sin()).collect();
                net.step(&mut state, &obs, &mut action).unwrap();
                let f = net.features(&state);
                assert!(f.iter().all(|&x| (0.0..=1.0).contains(&x)));
                any_spike |= f.iter().any(|&x| x > 0.0);
                assert!(action.iter().all(|a| a.abs() <= 1.0));
            }
            assert!(any_spike);
        }
    }

    #[test]
    fn stepping_is_deterministic() {
        let (spec, genome) = circuit(NeuronModel::Izhikevich(IzhikevichParams::default()));
        let net = CompiledNetwork::new(&spec, &genome).unwrap();
        let obs: Vec<f64> = (0..10).map(|i| i as f64 * 0.1 - 0.4).collect();
        let a = forward_episode_step(&spec, &genome, &net.reset(), &obs).unwrap();
        let b = forward_episode_step(&spec, &genome, &net.reset(), &obs).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let (spec, genome) = circuit(NeuronModel::Artificial);
        let net = CompiledNetwork::new(&spec, &genome).unwrap();
        assert!(matches!(
            forward_episode_step(&spec, &genome, &net.reset(), &[0.0; 3]),
            Err(NetworkError::Dimension { what: "observation", .. })
        ));
    }

    #[test]
    fn synapses_carry_a_one_step_delay() {
        let shape = IoShape { obs_dim: 1, action_dim: 1, substeps: 1 };
        let io = IoSpec::new(shape, vec![0], vec![1], NeuronModelKind::Artificial);
        let spec = NetworkSpec {
            neuron_count: 2,
            edges: vec![Edge { pre: 0, post: 1, sign: Sign::Positive, count: 2 }],
            io,
            provenance: Provenance::ExactConnectome,
            hidden: None,
        };
        let genome = Genome {
            coding: WeightCoding::LogSigned,
            weights: vec![0.0],
            signs: Arc::from(vec![Sign::Positive]),
            enc: Affine { inputs: 1, outputs: 1, weights: vec![1.0], bias: vec![0.0] },
            dec: Affine { inputs: 1, outputs: 1, weights: vec![1.0], bias: vec![0.0] },
            model: NeuronModel::Artificial,
        };
        let net = CompiledNetwork::new(&spec, &genome).unwrap();
        let mut state = net.reset();
        let mut action = [0.0];
        net.step(&mut state, &[1.0], &mut action).unwrap();
        assert_eq!(action[0], 0.0);
        net.step(&mut state, &[1.0], &mut action).unwrap();
        assert_eq!(action[0], (2.0 * 1.0f64.tanh()).tanh());
    }

    #[test]
    fn layered_baseline_reaches_its_outputs() {
        let shape = IoShape { obs_dim: 3, action_dim: 2, substeps: 4 };
        let (spec, genome) = build_fully_connected(12, shape, NeuronModel::Artificial, 2).unwrap();
        let net = CompiledNetwork::new(&spec, &genome).unwrap();
        let mut state = net.reset();
        let mut action = [0.0; 2];
        net.step(&mut state, &[1.0, -1.0, 0.5], &mut action).unwrap();
        assert!(net.features(&state).iter().any(|&x| x > 0.0));
    }
}
