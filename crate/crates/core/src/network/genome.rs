use std::ops::Range;
use std::sync::Arc;

use rand::Rng;

use super::NetworkError;
use crate::connectome::Sign;
use crate::neuron::NeuronModel;

/// Log-magnitudes are clamped to this range before exponentiation so that the
/// effective weight is always finite and nonzero.
pub const LOG_WEIGHT_LIMIT: f64 = 700.0;

/// `sign * exp(w_log)`: the sign of the result is the stored sign for every
/// finite `w_log`.
#[inline]
pub fn effective_weight(sign: Sign, w_log: f64) -> f64 {
    sign.apply(w_log.clamp(-LOG_WEIGHT_LIMIT, LOG_WEIGHT_LIMIT).exp())
}

/// How the per-synapse genes map to synaptic weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightCoding {
    /// Genes are log-magnitudes; signs are fixed per synapse.
    LogSigned,
    /// Genes are the signed weights themselves.
    Linear,
}

/// Independently mutated parameter groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamGroup {
    Connectome,
    EncDec,
    /// Neuron-model constants; tuned by pretraining, never mutated by the GA.
    Shared,
}

/// Dense affine map stored input-major: `weights[i * outputs + j]` connects
/// input `i` to output `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Affine {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Affine { inputs, outputs, weights: vec![0.0; inputs * outputs], bias: vec![0.0; outputs] }
    }

    pub fn uniform<R: Rng + ?Sized>(inputs: usize, outputs: usize, half_width: f64, rng: &mut R) -> Self {
        let mut draw = |n: usize| (0..n).map(|_| rng.random_range(-half_width..half_width)).collect::<Vec<_>>();
        let weights = draw(inputs * outputs);
        let bias = draw(outputs);
        Affine { inputs, outputs, weights, bias }
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    /// `out = bias + x * W`; zero inputs are skipped.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.bias);
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                let row = &self.weights[i * self.outputs..(i + 1) * self.outputs];
                for (o, w) in out.iter_mut().zip(row) {
                    *o += xi * w;
                }
            }
        }
    }
}

/// Evolvable parameters of one network.
///
/// The flat layout is `[synapse genes, enc.weights, enc.bias, dec.weights,
/// dec.bias, model constants]`. Signs are shared and immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct Genome {
    pub coding: WeightCoding,
    pub weights: Vec<f64>,
    /// One sign per synapse gene for [`WeightCoding::LogSigned`], empty otherwise.
    pub signs: Arc<[Sign]>,
    pub enc: Affine,
    pub dec: Affine,
    pub model: NeuronModel,
}

impl Genome {
    /// A bare parameter vector without encoder or decoder, e.g. for analytic
    /// objectives.
    pub fn plain(values: Vec<f64>) -> Self {
        Genome {
            coding: WeightCoding::Linear,
            weights: values,
            signs: Arc::from(Vec::new()),
            enc: Affine::zeros(0, 0),
            dec: Affine::zeros(0, 0),
            model: NeuronModel::Artificial,
        }
    }

    #[inline]
    pub fn synapse_weight(&self, i: usize) -> f64 {
        match self.coding {
            WeightCoding::LogSigned => effective_weight(self.signs[i], self.weights[i]),
            WeightCoding::Linear => self.weights[i],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len() + self.enc.param_count() + self.dec.param_count() + self.model.shared_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn group_range(&self, group: ParamGroup) -> Range<usize> {
        match group {
            ParamGroup::Connectome => 0..self.weights.len(),
            ParamGroup::EncDec => self.weights.len()..self.len() - self.model.shared_count(),
            ParamGroup::Shared => self.len() - self.model.shared_count()..self.len(),
        }
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.len());
        flat.extend_from_slice(&self.weights);
        flat.extend_from_slice(&self.enc.weights);
        flat.extend_from_slice(&self.enc.bias);
        flat.extend_from_slice(&self.dec.weights);
        flat.extend_from_slice(&self.dec.bias);
        flat.extend(self.model.shared());
        flat
    }

    /// Rebuilds a genome with this genome's structure from a flat vector.
    pub fn unflatten(&self, flat: &[f64]) -> Result<Genome, NetworkError> {
        if flat.len() != self.len() {
            return Err(NetworkError::Dimension { what: "flat genome", expected: self.len(), got: flat.len() });
        }
        let mut out = self.clone();
        out.assign_flat(flat);
        Ok(out)
    }

    fn assign_flat(&mut self, flat: &[f64]) {
        let mut rest = flat;
        for slot in [
            &mut self.weights,
            &mut self.enc.weights,
            &mut self.enc.bias,
            &mut self.dec.weights,
            &mut self.dec.bias,
        ] {
            let (head, tail) = rest.split_at(slot.len());
            slot.copy_from_slice(head);
            rest = tail;
        }
        self.model.set_shared(rest);
    }

    /// Applies `f(group, gene)` to every gene in flat order.
    pub fn for_each_gene_mut(&mut self, mut f: impl FnMut(ParamGroup, &mut f64)) {
        for w in &mut self.weights {
            f(ParamGroup::Connectome, w);
        }
        for slot in [&mut self.enc.weights, &mut self.enc.bias, &mut self.dec.weights, &mut self.dec.bias] {
            for w in slot.iter_mut() {
                f(ParamGroup::EncDec, w);
            }
        }
        let mut shared = self.model.shared();
        for w in &mut shared {
            f(ParamGroup::Shared, w);
        }
        self.model.set_shared(&shared);
    }

    /// Number of synapses whose effective sign differs from the stored sign.
    pub fn sign_violations(&self) -> usize {
        match self.coding {
            WeightCoding::Linear => 0,
            WeightCoding::LogSigned => (0..self.weights.len())
                .filter(|&i| {
                    let w = self.synapse_weight(i);
                    w == 0.0 || w.signum() != self.signs[i].as_f64()
                })
                .count(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuron::AlifParams;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn effective_weight_examples() {
        assert!((effective_weight(Sign::Positive, -1.0) - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert_eq!(effective_weight(Sign::Negative, 0.0), -1.0);
        assert!((effective_weight(Sign::Positive, 2f64.ln()) - 2.0).abs() < 1e-15);
        assert!(effective_weight(Sign::Negative, -1e9) < 0.0);
        assert!(effective_weight(Sign::Positive, 1e9).is_finite());
    }

    #[test]
    fn affine_apply() {
        let a = Affine { inputs: 2, outputs: 2, weights: vec![1.0, 2.0, 3.0, 4.0], bias: vec![0.5, -0.5] };
        let mut out = [0.0; 2];
        a.apply(&[1.0, 2.0], &mut out);
        assert_eq!(out, [0.5 + 1.0 + 6.0, -0.5 + 2.0 + 8.0]);
    }

    fn sample_genome(seed: u64) -> Genome {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 7;
        Genome {
            coding: WeightCoding::LogSigned,
            weights: (0..n).map(|_| rng.random_range(-3.0..3.0)).collect(),
            signs: (0..n).map(|i| if i % 2 == 0 { Sign::Positive } else { Sign::Negative }).collect(),
            enc: Affine::uniform(3, 4, 0.3, &mut rng),
            dec: Affine::uniform(5, 2, 0.3, &mut rng),
            model: NeuronModel::Alif(AlifParams::default()),
        }
    }

    #[test]
    fn group_ranges_cover_flat_layout() {
        let g = sample_genome(1);
        assert_eq!(g.len(), 7 + 3 * 4 + 4 + 5 * 2 + 2 + 3);
        assert_eq!(g.group_range(ParamGroup::Connectome), 0..7);
        assert_eq!(g.group_range(ParamGroup::EncDec), 7..g.len() - 3);
        assert_eq!(g.group_range(ParamGroup::Shared), g.len() - 3..g.len());
        let d = AlifParams::default();
        assert_eq!(g.flatten()[g.len() - 3..], [d.gamma, d.gamma_s, d.beta]);
        assert!(matches!(g.unflatten(&[0.0; 3]), Err(NetworkError::Dimension { .. })));
    }

    proptest! {
        #[test]
        fn flatten_unflatten_is_a_bijection(seed in any::<u64>(), noise in proptest::collection::vec(-5.0f64..5.0, 38)) {
            let g = sample_genome(seed);
            prop_assert_eq!(g.unflatten(&g.flatten()).unwrap(), g.clone());
            let h = g.unflatten(&noise).unwrap();
            prop_assert_eq!(h.flatten(), noise);
            prop_assert_eq!(h.signs, g.signs);
        }
    }
}
