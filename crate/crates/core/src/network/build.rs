use std::sync::Arc;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Affine, Edge, Genome, IoShape, IoSpec, NetworkError, NetworkSpec, Provenance, WeightCoding};
use crate::connectome::{validate, Connectome, ConnectomeStats, Polarity, Sign};
use crate::neuron::{NeuronModel, NeuronModelKind};

/// Encoder, decoder and baseline hidden weights are drawn from `U(-0.3, 0.3)`.
pub const ENC_DEC_INIT: f64 = 0.3;

/// Initial log-magnitude shared by all synapses of one polarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitWeights {
    pub excitatory_log: f64,
    pub inhibitory_log: f64,
}

impl InitWeights {
    pub fn for_model(kind: NeuronModelKind) -> Self {
        let (excitatory_log, inhibitory_log) = match kind {
            NeuronModelKind::Artificial => (-2.5, -3.0),
            NeuronModelKind::Alif => (-1.0, -1.5),
            NeuronModelKind::Izhikevich => (2.0, 1.0),
        };
        InitWeights { excitatory_log, inhibitory_log }
    }

    fn for_sign(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Positive => self.excitatory_log,
            Sign::Negative => self.inhibitory_log,
        }
    }
}

fn encoder_decoder(io: &IoSpec, rng: &mut ChaCha8Rng) -> (Affine, Affine) {
    let enc = Affine::uniform(io.obs_dim, io.input_neurons.len(), ENC_DEC_INIT, rng);
    let dec = Affine::uniform(io.output_neurons.len(), io.action_dim, ENC_DEC_INIT, rng);
    (enc, dec)
}

fn log_signed_genome(edges: &[Edge], init: &InitWeights, model: NeuronModel, io: &IoSpec, seed: u64) -> Genome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (enc, dec) = encoder_decoder(io, &mut rng);
    Genome {
        coding: WeightCoding::LogSigned,
        weights: edges.iter().map(|e| init.for_sign(e.sign)).collect(),
        signs: edges.iter().map(|e| e.sign).collect::<Arc<[Sign]>>(),
        enc,
        dec,
        model,
    }
}

/// Mirrors the connectome synapse-for-synapse.
pub fn build_exact(
    c: &Connectome,
    model: NeuronModel,
    io: IoSpec,
    init: InitWeights,
    seed: u64,
) -> Result<(NetworkSpec, Genome), NetworkError> {
    if let Err(violations) = validate(c) {
        return Err(NetworkError::Build(format!("invalid connectome: {}", violations[0])));
    }
    io.check(c.neurons.len(), model.kind())?;
    let edges: Vec<Edge> =
        c.synapses.iter().map(|s| Edge { pre: s.pre, post: s.post, sign: s.sign, count: s.count }).collect();
    let genome = log_signed_genome(&edges, &init, model, &io, seed);
    let spec =
        NetworkSpec { neuron_count: c.neurons.len(), edges, io, provenance: Provenance::ExactConnectome, hidden: None };
    Ok((spec, genome))
}

/// Samples `k` distinct ordered pairs `(pre, post)`, `pre` drawn from `pres`,
/// `post != pre`.
fn sample_pairs(rng: &mut ChaCha8Rng, pres: &[usize], n: usize, k: usize) -> Vec<(usize, usize)> {
    let slots = pres.len() * (n - 1);
    index::sample(rng, slots, k)
        .into_iter()
        .map(|slot| {
            let pre = pres[slot / (n - 1)];
            let off = slot % (n - 1);
            (pre, if off < pre { off } else { off + 1 })
        })
        .collect()
}

/// Random recurrent graph with the same neuron count, synapse count and
/// excitatory/inhibitory split as `st`, obeying Dale's law per presynaptic
/// neuron.
pub fn build_stat_matched(
    st: &ConnectomeStats,
    model: NeuronModel,
    io: IoSpec,
    init: InitWeights,
    seed: u64,
) -> Result<(NetworkSpec, Genome), NetworkError> {
    let n = st.neuron_count;
    let total = st.synapse_count;
    let exc = st.excitatory_count;
    let inh = total - exc;
    let capacity = n * n.saturating_sub(1);
    if total > capacity {
        return Err(NetworkError::Infeasible(format!(
            "{total} synapses do not fit in a simple digraph on {n} neurons"
        )));
    }
    io.check(n, model.kind())?;

    let ratio = if st.excitatory_neurons + st.inhibitory_neurons > 0 {
        st.excitatory_neurons as f64 / (st.excitatory_neurons + st.inhibitory_neurons) as f64
    } else if total > 0 {
        exc as f64 / total as f64
    } else {
        1.0
    };
    let per_neuron = n.saturating_sub(1).max(1);
    let lo = exc.div_ceil(per_neuron);
    let hi = n - inh.div_ceil(per_neuron);
    if lo > hi {
        return Err(NetworkError::Infeasible(format!(
            "{exc} excitatory and {inh} inhibitory synapses cannot share {n} neurons under Dale's law"
        )));
    }
    let n_exc = ((ratio * n as f64).round() as usize).clamp(lo, hi);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut polarity = vec![Polarity::Inhibitory; n];
    for i in index::sample(&mut rng, n, n_exc) {
        polarity[i] = Polarity::Excitatory;
    }
    let pool = |p: Polarity| (0..n).filter(|&i| polarity[i] == p).collect::<Vec<_>>();
    let (exc_pool, inh_pool) = (pool(Polarity::Excitatory), pool(Polarity::Inhibitory));
    let mut edges: Vec<Edge> = Vec::with_capacity(total);
    for (pres, k, sign) in [(&exc_pool, exc, Sign::Positive), (&inh_pool, inh, Sign::Negative)] {
        if k > 0 {
            edges.extend(
                sample_pairs(&mut rng, pres, n, k).into_iter().map(|(pre, post)| Edge { pre, post, sign, count: 1 }),
            );
        }
    }
    edges.sort_by_key(|e| (e.pre, e.post));

    let genome = log_signed_genome(&edges, &init, model, &io, rng.random());
    let spec = NetworkSpec { neuron_count: n, edges, io, provenance: Provenance::StatMatched, hidden: None };
    Ok((spec, genome))
}

/// Hidden layer sizes for a two-hidden-layer baseline with `neuron_count` neurons.
pub fn hidden_split(neuron_count: usize) -> (usize, usize) {
    let h2 = neuron_count / 2;
    (neuron_count - h2, h2)
}

fn layered_io(neuron_count: usize, shape: IoShape, kind: NeuronModelKind) -> Result<IoSpec, NetworkError> {
    if neuron_count < 2 {
        return Err(NetworkError::Build("layered baselines need at least 2 neurons".into()));
    }
    let (h1, _) = hidden_split(neuron_count);
    Ok(IoSpec::new(shape, (0..h1).collect(), (h1..neuron_count).collect(), kind))
}

/// obs -> hidden1 -> hidden2 -> action with dense, unconstrained hidden weights.
pub fn build_fully_connected(
    neuron_count: usize,
    shape: IoShape,
    model: NeuronModel,
    seed: u64,
) -> Result<(NetworkSpec, Genome), NetworkError> {
    let io = layered_io(neuron_count, shape, model.kind())?;
    io.check(neuron_count, model.kind())?;
    let (h1, h2) = hidden_split(neuron_count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (enc, dec) = encoder_decoder(&io, &mut rng);
    let mut edges = Vec::with_capacity(h1 * h2);
    let mut weights = Vec::with_capacity(h1 * h2);
    for pre in 0..h1 {
        for post in h1..neuron_count {
            let w: f64 = rng.random_range(-ENC_DEC_INIT..ENC_DEC_INIT);
            let sign = if w < 0.0 { Sign::Negative } else { Sign::Positive };
            edges.push(Edge { pre, post, sign, count: 1 });
            weights.push(w);
        }
    }
    let genome = Genome { coding: WeightCoding::Linear, weights, signs: Arc::from(Vec::new()), enc, dec, model };
    let spec = NetworkSpec {
        neuron_count,
        edges,
        io,
        provenance: Provenance::FullyConnected,
        hidden: Some((h1, h2)),
    };
    Ok((spec, genome))
}

/// Layered baseline whose hidden-hidden block has a density and an
/// excitatory fraction both drawn from `U(0, 1)`.
pub fn build_random_sparse(
    neuron_count: usize,
    shape: IoShape,
    model: NeuronModel,
    seed: u64,
) -> Result<(NetworkSpec, Genome), NetworkError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density: f64 = rng.random();
    let excitatory_ratio: f64 = rng.random();
    build_random_sparse_with(neuron_count, shape, model, density, excitatory_ratio, rng.random())
}

/// [`build_random_sparse`] with the density and excitatory fraction given.
///
/// The block keeps exactly `round(density * h1 * h2)` entries and
/// `round(excitatory_ratio * h1)` first-layer neurons are excitatory. Hidden
/// weights are log-coded so their signs stay fixed.
pub fn build_random_sparse_with(
    neuron_count: usize,
    shape: IoShape,
    model: NeuronModel,
    density: f64,
    excitatory_ratio: f64,
    seed: u64,
) -> Result<(NetworkSpec, Genome), NetworkError> {
    if !(0.0..=1.0).contains(&density) || !(0.0..=1.0).contains(&excitatory_ratio) {
        return Err(NetworkError::Build("density and excitatory ratio must lie in [0, 1]".into()));
    }
    let io = layered_io(neuron_count, shape, model.kind())?;
    io.check(neuron_count, model.kind())?;
    let (h1, h2) = hidden_split(neuron_count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (enc, dec) = encoder_decoder(&io, &mut rng);

    let n_exc = (excitatory_ratio * h1 as f64).round() as usize;
    let mut signs_by_pre = vec![Sign::Negative; h1];
    for i in index::sample(&mut rng, h1, n_exc) {
        signs_by_pre[i] = Sign::Positive;
    }
    let kept = (density * (h1 * h2) as f64).round() as usize;
    let mut slots: Vec<usize> = index::sample(&mut rng, h1 * h2, kept).into_vec();
    slots.sort_unstable();

    let mut edges = Vec::with_capacity(kept);
    let mut weights = Vec::with_capacity(kept);
    for slot in slots {
        let (pre, post) = (slot / h2, h1 + slot % h2);
        edges.push(Edge { pre, post, sign: signs_by_pre[pre], count: 1 });
        let magnitude: f64 = rng.random_range(0.0..ENC_DEC_INIT);
        weights.push(magnitude.max(1e-6).ln());
    }
    let genome = Genome {
        coding: WeightCoding::LogSigned,
        weights,
        signs: edges.iter().map(|e| e.sign).collect::<Arc<[Sign]>>(),
        enc,
        dec,
        model,
    };
    let spec = NetworkSpec {
        neuron_count,
        edges,
        io,
        provenance: Provenance::RandomSparse { density, excitatory_ratio },
        hidden: Some((h1, h2)),
    };
    Ok((spec, genome))
}
