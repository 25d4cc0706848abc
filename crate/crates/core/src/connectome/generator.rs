//! Parameterized generator for the repeating motor microcircuit of the worm's
//! ventral nerve cord.
//!
//! Within every segment:
//! - DB excites the dorsal muscles and the VD neurons,
//! - VB excites the ventral muscles and the DD neurons,
//! - DD inhibits the dorsal muscles,
//! - VD inhibits the ventral muscles and the VB neurons.
//!
//! Segments are chained head to tail: the i-th B neuron of each class excites
//! the i-th B neuron of the same class in the next segment. Segment 0 is the
//! head.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Connectome, ConnectomeError, Neuron, NeuronClass, Polarity, Subtype, Synapse};

/// Per-segment neuron counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocomotionConfig {
    pub db: usize,
    pub vb: usize,
    pub dd: usize,
    pub vd: usize,
    pub dorsal_muscles: usize,
    pub ventral_muscles: usize,
}

impl Default for LocomotionConfig {
    /// 6 segments of this layout give 72 motor neurons and 96 muscle cells.
    fn default() -> Self {
        LocomotionConfig { db: 2, vb: 4, dd: 2, vd: 4, dorsal_muscles: 8, ventral_muscles: 8 }
    }
}

impl LocomotionConfig {
    pub fn per_segment(&self) -> usize {
        self.db + self.vb + self.dd + self.vd + self.dorsal_muscles + self.ventral_muscles
    }

    fn check(&self) -> Result<(), ConnectomeError> {
        let fields = [
            ("db", self.db),
            ("vb", self.vb),
            ("dd", self.dd),
            ("vd", self.vd),
            ("dorsal_muscles", self.dorsal_muscles),
            ("ventral_muscles", self.ventral_muscles),
        ];
        for (name, count) in fields {
            if count == 0 {
                return Err(ConnectomeError::Config(format!("`{name}` must be at least 1 per segment")));
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct SegmentIds {
    db: Vec<usize>,
    vb: Vec<usize>,
    dd: Vec<usize>,
    vd: Vec<usize>,
    dorsal: Vec<usize>,
    ventral: Vec<usize>,
}

pub fn generate_locomotion_circuit(
    segments: usize,
    cfg: &LocomotionConfig,
) -> Result<Connectome, ConnectomeError> {
    if segments == 0 {
        return Err(ConnectomeError::Config("`segments` must be at least 1".into()));
    }
    cfg.check()?;

    let mut neurons = Vec::with_capacity(segments * cfg.per_segment());
    let mut layout = Vec::with_capacity(segments);
    for seg in 0..segments {
        let mut ids = SegmentIds::default();
        let groups: [(&str, usize, NeuronClass, Subtype, Polarity, &mut Vec<usize>); 6] = [
            ("DB", cfg.db, NeuronClass::Motor, Subtype::DB, Polarity::Excitatory, &mut ids.db),
            ("VB", cfg.vb, NeuronClass::Motor, Subtype::VB, Polarity::Excitatory, &mut ids.vb),
            ("DD", cfg.dd, NeuronClass::Motor, Subtype::DD, Polarity::Inhibitory, &mut ids.dd),
            ("VD", cfg.vd, NeuronClass::Motor, Subtype::VD, Polarity::Inhibitory, &mut ids.vd),
            (
                "MD",
                cfg.dorsal_muscles,
                NeuronClass::Muscle,
                Subtype::MuscleDorsal,
                Polarity::Excitatory,
                &mut ids.dorsal,
            ),
            (
                "MV",
                cfg.ventral_muscles,
                NeuronClass::Muscle,
                Subtype::MuscleVentral,
                Polarity::Excitatory,
                &mut ids.ventral,
            ),
        ];
        for (prefix, count, class, subtype, polarity, slot) in groups {
            for i in 0..count {
                let id = neurons.len();
                neurons.push(Neuron {
                    id,
                    name: format!("{prefix}{}.{}", seg + 1, i + 1),
                    class,
                    subtype,
                    segment: seg as u32,
                    polarity,
                });
                slot.push(id);
            }
        }
        layout.push(ids);
    }

    let mut synapses = Vec::new();
    let mut connect = |pres: &[usize], posts: &[usize], polarity: Polarity| {
        for &pre in pres {
            for &post in posts {
                synapses.push(Synapse::new(pre, post, polarity.sign()));
            }
        }
    };
    for ids in &layout {
        connect(&ids.db, &ids.dorsal, Polarity::Excitatory);
        connect(&ids.db, &ids.vd, Polarity::Excitatory);
        connect(&ids.vb, &ids.ventral, Polarity::Excitatory);
        connect(&ids.vb, &ids.dd, Polarity::Excitatory);
        connect(&ids.dd, &ids.dorsal, Polarity::Inhibitory);
        connect(&ids.vd, &ids.ventral, Polarity::Inhibitory);
        connect(&ids.vd, &ids.vb, Polarity::Inhibitory);
    }
    for pair in layout.windows(2) {
        let (front, back) = (&pair[0], &pair[1]);
        for (pre, post) in front.db.iter().zip(&back.db).chain(front.vb.iter().zip(&back.vb)) {
            synapses.push(Synapse::new(*pre, *post, Polarity::Excitatory.sign()));
        }
    }

    let mut metadata = BTreeMap::new();
    metadata.insert("generator".to_string(), "locomotion_circuit".to_string());
    metadata.insert("segments".to_string(), segments.to_string());
    metadata.insert(
        "per_segment".to_string(),
        format!(
            "DB={} VB={} DD={} VD={} MD={} MV={}",
            cfg.db, cfg.vb, cfg.dd, cfg.vd, cfg.dorsal_muscles, cfg.ventral_muscles
        ),
    );
    Ok(Connectome { neurons, synapses, metadata })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectome::{serialize_connectome, stats, validate, Sign};

    #[test]
    fn default_six_segments_counts() {
        let c = generate_locomotion_circuit(6, &LocomotionConfig::default()).unwrap();
        let st = stats(&c);
        assert_eq!(st.class_counts[&NeuronClass::Motor], 72);
        assert_eq!(st.class_counts[&NeuronClass::Muscle], 96);
        assert_eq!(st.neuron_count, 168);
        // 128 synapses inside each segment, 6 B->B links across each of the 5 boundaries.
        assert_eq!(st.synapse_count, 6 * 128 + 5 * 6);
        assert_eq!(st.excitatory_count + st.inhibitory_count, st.synapse_count);
        assert!(st.sparsity < 0.10, "sparsity {}", st.sparsity);
        assert_eq!(validate(&c), Ok(()));
    }

    #[test]
    fn single_segment_signs() {
        let cfg = LocomotionConfig { db: 1, vb: 1, dd: 1, vd: 1, dorsal_muscles: 1, ventral_muscles: 1 };
        let c = generate_locomotion_circuit(1, &cfg).unwrap();
        let subtype = |id: usize| c.neurons[id].subtype;
        let vb_dd: Vec<_> =
            c.synapses.iter().filter(|s| subtype(s.pre) == Subtype::VB && subtype(s.post) == Subtype::DD).collect();
        let vd_vb: Vec<_> =
            c.synapses.iter().filter(|s| subtype(s.pre) == Subtype::VD && subtype(s.post) == Subtype::VB).collect();
        assert_eq!(vb_dd.len(), 1);
        assert_eq!(vd_vb.len(), 1);
        assert!(vb_dd.iter().all(|s| s.sign == Sign::Positive));
        assert!(vd_vb.iter().all(|s| s.sign == Sign::Negative));
    }

    #[test]
    fn zero_count_is_a_config_error() {
        let cfg = LocomotionConfig { vd: 0, ..LocomotionConfig::default() };
        assert!(matches!(generate_locomotion_circuit(6, &cfg), Err(ConnectomeError::Config(_))));
        assert!(matches!(
            generate_locomotion_circuit(0, &LocomotionConfig::default()),
            Err(ConnectomeError::Config(_))
        ));
    }

    #[test]
    fn chaining_runs_head_to_tail_between_same_class_b_neurons() {
        let c = generate_locomotion_circuit(3, &LocomotionConfig::default()).unwrap();
        let cross: Vec<_> = c
            .synapses
            .iter()
            .filter(|s| c.neurons[s.pre].segment != c.neurons[s.post].segment)
            .collect();
        assert_eq!(cross.len(), 2 * (2 + 4));
        for s in cross {
            let (a, b) = (&c.neurons[s.pre], &c.neurons[s.post]);
            assert_eq!(b.segment, a.segment + 1);
            assert_eq!(a.subtype, b.subtype);
            assert!(matches!(a.subtype, Subtype::DB | Subtype::VB));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = LocomotionConfig::default();
        let a = serialize_connectome(&generate_locomotion_circuit(6, &cfg).unwrap());
        let b = serialize_connectome(&generate_locomotion_circuit(6, &cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn every_generated_synapse_obeys_dale() {
        for segments in 1..=8 {
            let c = generate_locomotion_circuit(segments, &LocomotionConfig::default()).unwrap();
            for s in &c.synapses {
                assert_eq!(s.sign, c.neurons[s.pre].polarity.sign());
            }
        }
    }
}
