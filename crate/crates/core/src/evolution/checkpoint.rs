//! Versioned binary checkpoints of a [`TrainingRun`].
//!
//! Layout: `b"NEMA"`, format version (u32), then the sections `CONF`, `CTXT`,
//! `RNGL`, `STAT` and `GENO` in that order. Every section is a 4-byte tag,
//! a u64 payload length and the payload. Integers are little-endian and
//! floats are stored as their IEEE-754 bits, so a round trip is exact.

use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use super::{CurveRow, GaConfig, Lineage, TrainingRun};
use crate::connectome::Sign;
use crate::network::{Affine, Genome, WeightCoding};
use crate::neuron::{AlifParams, IzhikevichParams, NeuronModel};

const MAGIC: &[u8; 4] = b"NEMA";
pub const CHECKPOINT_VERSION: u32 = 1;
const SECTIONS: [&[u8; 4]; 5] = [b"CONF", b"CTXT", b"RNGL", b"STAT", b"GENO"];

#[derive(Debug, Error, PartialEq)]
pub enum CheckpointError {
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {found}, expected {CHECKPOINT_VERSION}")]
    Version { found: u32 },
    #[error("checkpoint truncated at byte {0}")]
    Truncated(usize),
    #[error("malformed checkpoint at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, x: u8) {
        self.buf.push(x);
    }
    fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }
    fn usize(&mut self, x: usize) {
        self.u64(x as u64);
    }
    fn f64(&mut self, x: f64) {
        self.u64(x.to_bits());
    }
    fn f64s(&mut self, xs: &[f64]) {
        for &x in xs {
            self.f64(x);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    /// Absolute offset of `buf[0]` in the checkpoint, for error messages.
    base: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(CheckpointError::Truncated(self.base + self.buf.len())),
        }
    }
    fn u8(&mut self) -> Result<u8, CheckpointError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn usize(&mut self) -> Result<usize, CheckpointError> {
        let at = self.base + self.pos;
        usize::try_from(self.u64()?).map_err(|_| self.malformed_at(at, "length does not fit in memory"))
    }
    fn f64(&mut self) -> Result<f64, CheckpointError> {
        Ok(f64::from_bits(self.u64()?))
    }
    /// A count of items of `item_size` bytes, checked against the bytes left.
    fn count(&mut self, item_size: usize) -> Result<usize, CheckpointError> {
        let at = self.base + self.pos;
        let n = self.usize()?;
        if n.saturating_mul(item_size) > self.buf.len() - self.pos {
            return Err(self.malformed_at(at, &format!("count {n} exceeds the remaining payload")));
        }
        Ok(n)
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, CheckpointError> {
        (0..n).map(|_| self.f64()).collect()
    }
    fn malformed_at(&self, offset: usize, message: &str) -> CheckpointError {
        CheckpointError::Malformed { offset, message: message.to_string() }
    }
    fn malformed(&self, message: &str) -> CheckpointError {
        self.malformed_at(self.base + self.pos, message)
    }
    fn finish(&self) -> Result<(), CheckpointError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(self.malformed("unexpected trailing bytes"))
        }
    }
}

fn write_model(w: &mut Writer, model: &NeuronModel) {
    match model {
        NeuronModel::Artificial => w.u8(0),
        NeuronModel::Alif(p) => {
            w.u8(1);
            w.f64s(&[p.gamma, p.gamma_s, p.beta, p.v_th]);
        }
        NeuronModel::Izhikevich(p) => {
            w.u8(2);
            w.f64s(&[p.a, p.b, p.c, p.d, p.v_peak, p.current_scale, p.dt_scale]);
        }
    }
}

fn read_model(r: &mut Reader) -> Result<NeuronModel, CheckpointError> {
    Ok(match r.u8()? {
        0 => NeuronModel::Artificial,
        1 => {
            let p = r.f64s(4)?;
            NeuronModel::Alif(AlifParams { gamma: p[0], gamma_s: p[1], beta: p[2], v_th: p[3] })
        }
        2 => {
            let p = r.f64s(7)?;
            NeuronModel::Izhikevich(IzhikevichParams {
                a: p[0],
                b: p[1],
                c: p[2],
                d: p[3],
                v_peak: p[4],
                current_scale: p[5],
                dt_scale: p[6],
            })
        }
        tag => return Err(r.malformed(&format!("unknown neuron model tag {tag}"))),
    })
}

fn section(out: &mut Vec<u8>, tag: &[u8; 4], payload: Writer) {
    out.extend_from_slice(tag);
    out.extend_from_slice(&(payload.buf.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload.buf);
}

pub fn checkpoint_save(run: &TrainingRun) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());

    let c = &run.config;
    let mut w = Writer::default();
    w.usize(c.population_size);
    w.usize(c.elite_size);
    w.f64s(&[c.mutation_rate_enc_dec, c.mutation_rate_connectome, c.decay_enc_dec, c.decay_connectome]);
    w.u64(c.generations);
    w.u64(c.seed);
    section(&mut out, SECTIONS[0], w);

    section(&mut out, SECTIONS[1], Writer { buf: run.context.as_bytes().to_vec() });

    let mut w = Writer::default();
    w.u64(run.lineage.root);
    w.u64(run.generation);
    section(&mut out, SECTIONS[2], w);

    let mut w = Writer::default();
    w.f64(run.rate_connectome);
    w.f64(run.rate_enc_dec);
    w.usize(run.curve.len());
    for row in &run.curve {
        w.u64(row.generation);
        w.f64s(&[row.best, row.mean, row.std, row.mutation_rate_connectome, row.mutation_rate_enc_dec]);
    }
    w.usize(run.fitness.len());
    w.f64s(&run.fitness);
    section(&mut out, SECTIONS[3], w);

    let mut w = Writer::default();
    w.usize(run.population.len());
    if let Some(t) = run.population.first() {
        w.u8(match t.coding {
            WeightCoding::LogSigned => 0,
            WeightCoding::Linear => 1,
        });
        write_model(&mut w, &t.model);
        w.usize(t.weights.len());
        w.usize(t.signs.len());
        for s in t.signs.iter() {
            w.u8(match s {
                Sign::Positive => 1,
                Sign::Negative => 0,
            });
        }
        for a in [&t.enc, &t.dec] {
            w.usize(a.inputs);
            w.usize(a.outputs);
        }
        for g in &run.population {
            w.f64s(&g.flatten());
        }
    }
    section(&mut out, SECTIONS[4], w);
    out
}

pub fn checkpoint_load(bytes: &[u8]) -> Result<TrainingRun, CheckpointError> {
    let mut top = Reader { buf: bytes, pos: 0, base: 0 };
    if top.take(4).map_err(|_| CheckpointError::BadMagic)? != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = top.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::Version { found: version });
    }
    let mut payloads = Vec::with_capacity(SECTIONS.len());
    for tag in SECTIONS {
        let at = top.pos;
        if top.take(4)? != tag {
            return Err(top.malformed_at(at, &format!("expected section {}", String::from_utf8_lossy(tag))));
        }
        let len = top.usize()?;
        let base = top.pos;
        payloads.push(Reader { buf: top.take(len)?, pos: 0, base });
    }
    top.finish()?;
    let [mut conf, ctxt, mut rngl, mut stat, mut geno]: [Reader; 5] =
        payloads.try_into().unwrap_or_else(|_| unreachable!());

    let config = GaConfig {
        population_size: conf.usize()?,
        elite_size: conf.usize()?,
        mutation_rate_enc_dec: conf.f64()?,
        mutation_rate_connectome: conf.f64()?,
        decay_enc_dec: conf.f64()?,
        decay_connectome: conf.f64()?,
        generations: conf.u64()?,
        seed: conf.u64()?,
    };
    conf.finish()?;

    let context = String::from_utf8(ctxt.buf.to_vec()).map_err(|_| ctxt.malformed("context is not UTF-8"))?;

    let lineage = Lineage::new(rngl.u64()?);
    let generation = rngl.u64()?;
    rngl.finish()?;

    let rate_connectome = stat.f64()?;
    let rate_enc_dec = stat.f64()?;
    let rows = stat.count(48)?;
    let mut curve = Vec::with_capacity(rows);
    for _ in 0..rows {
        let generation = stat.u64()?;
        let v = stat.f64s(5)?;
        curve.push(CurveRow {
            generation,
            best: v[0],
            mean: v[1],
            std: v[2],
            mutation_rate_connectome: v[3],
            mutation_rate_enc_dec: v[4],
        });
    }
    let n_fit = stat.count(8)?;
    let fitness = stat.f64s(n_fit)?;
    stat.finish()?;

    let n_pop = geno.usize()?;
    let mut population = Vec::with_capacity(n_pop.min(1 << 20));
    if n_pop > 0 {
        let coding = match geno.u8()? {
            0 => WeightCoding::LogSigned,
            1 => WeightCoding::Linear,
            tag => return Err(geno.malformed(&format!("unknown weight coding {tag}"))),
        };
        let model = read_model(&mut geno)?;
        let n_weights = geno.usize()?;
        let n_signs = geno.count(1)?;
        let signs: Arc<[Sign]> = (0..n_signs)
            .map(|_| match geno.u8()? {
                1 => Ok(Sign::Positive),
                0 => Ok(Sign::Negative),
                b => Err(geno.malformed(&format!("invalid sign byte {b}"))),
            })
            .collect::<Result<_, _>>()?;
        let mut dims = [0usize; 4];
        for d in &mut dims {
            *d = geno.usize()?;
        }
        let template = Genome {
            coding,
            weights: vec![0.0; n_weights],
            signs,
            enc: Affine::zeros(dims[0], dims[1]),
            dec: Affine::zeros(dims[2], dims[3]),
            model,
        };
        let len = template.len();
        if n_pop.saturating_mul(len).saturating_mul(8) != geno.buf.len() - geno.pos {
            return Err(geno.malformed("genome payload does not match the population size"));
        }
        for _ in 0..n_pop {
            let flat = geno.f64s(len)?;
            population.push(template.unflatten(&flat).expect("length checked"));
        }
    }
    geno.finish()?;

    if fitness.len() != population.len() {
        return Err(CheckpointError::Malformed {
            offset: 0,
            message: format!("{} fitness values for {} genomes", fitness.len(), population.len()),
        });
    }
    Ok(TrainingRun {
        config,
        lineage,
        generation,
        population,
        fitness,
        curve,
        rate_connectome,
        rate_enc_dec,
        context,
    })
}

/// Writes the checkpoint next to `path` and renames it into place, so an
/// interrupted write never replaces a good checkpoint.
pub fn write_checkpoint(run: &TrainingRun, path: &Path) -> std::io::Result<()> {
    let tmp = path.with_extension("bin.tmp");
    std::fs::write(&tmp, checkpoint_save(run))?;
    std::fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::QuadraticTask;
    use crate::evolution::{ga_generation, Evaluator};

    fn run() -> TrainingRun {
        let task = QuadraticTask::zeros(4);
        let cfg = GaConfig { population_size: 6, elite_size: 2, generations: 5, seed: 7, ..GaConfig::limitations() };
        let ev = Evaluator::new(1).unwrap();
        let base = Genome {
            coding: WeightCoding::LogSigned,
            weights: vec![0.1, -0.2],
            signs: Arc::from(vec![Sign::Positive, Sign::Negative]),
            enc: Affine::zeros(1, 1),
            dec: Affine::zeros(0, 0),
            model: NeuronModel::Izhikevich(IzhikevichParams::default()),
        };
        let mut run = TrainingRun::initialize(base, cfg, &task, &ev).unwrap();
        ga_generation(&mut run, &task, &ev);
        run.context = "task = \"quadratic\"".into();
        run
    }

    #[test]
    fn round_trip_is_exact_and_idempotent() {
        let r = run();
        let bytes = checkpoint_save(&r);
        let back = checkpoint_load(&bytes).unwrap();
        assert_eq!(back, r);
        assert_eq!(checkpoint_save(&back), bytes);
    }

    #[test]
    fn corruption_is_detected() {
        let bytes = checkpoint_save(&run());
        assert_eq!(checkpoint_load(b"NOPE").unwrap_err(), CheckpointError::BadMagic);
        let mut v = bytes.clone();
        v[4] = 9;
        assert_eq!(checkpoint_load(&v).unwrap_err(), CheckpointError::Version { found: 9 });
        for cut in [3, 10, 20, bytes.len() / 2, bytes.len() - 1] {
            assert!(checkpoint_load(&bytes[..cut]).is_err(), "cut at {cut}");
        }
        let mut v = bytes.clone();
        v[12] = v[12].wrapping_add(1);
        assert!(checkpoint_load(&v).is_err());
        let mut v = bytes.clone();
        v.push(0);
        assert!(checkpoint_load(&v).is_err());
    }
}
