//! MNIST in the big-endian IDX container, and classification fitness.

use std::sync::Arc;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{Task, TaskError};
use crate::network::{CompiledNetwork, Genome, NetworkSpec};

pub const MNIST_PIXELS: usize = 28 * 28;
const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Error, PartialEq)]
#[error("IDX format error at byte {offset}: {message}")]
pub struct MnistError {
    pub offset: usize,
    pub message: String,
}

fn format_error(offset: usize, message: impl Into<String>) -> MnistError {
    MnistError { offset, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MnistDataset {
    /// Row-major `n × 784`, every value in `[0, 1]`.
    pub images: Vec<f64>,
    pub labels: Vec<u8>,
}

impl MnistDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn image(&self, i: usize) -> &[f64] {
        &self.images[i * MNIST_PIXELS..(i + 1) * MNIST_PIXELS]
    }
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32, MnistError> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| format_error(offset, "truncated header"))
}

pub fn load_mnist(image_bytes: &[u8], label_bytes: &[u8]) -> Result<MnistDataset, MnistError> {
    let magic = read_u32(image_bytes, 0)?;
    if magic != IMAGES_MAGIC {
        return Err(format_error(0, format!("images magic {magic:#010x}, expected {IMAGES_MAGIC:#010x}")));
    }
    let n = read_u32(image_bytes, 4)? as usize;
    let rows = read_u32(image_bytes, 8)?;
    let cols = read_u32(image_bytes, 12)?;
    if (rows, cols) != (28, 28) {
        return Err(format_error(8, format!("image size {rows}x{cols}, expected 28x28")));
    }
    let pixels = &image_bytes[16..];
    let want = n * MNIST_PIXELS;
    if pixels.len() != want {
        let at = 16 + pixels.len().min(want);
        return Err(format_error(at, format!("expected {want} pixel bytes, found {}", pixels.len())));
    }

    let magic = read_u32(label_bytes, 0)?;
    if magic != LABELS_MAGIC {
        return Err(format_error(0, format!("labels magic {magic:#010x}, expected {LABELS_MAGIC:#010x}")));
    }
    let m = read_u32(label_bytes, 4)? as usize;
    if m != n {
        return Err(format_error(4, format!("{m} labels for {n} images")));
    }
    let labels = &label_bytes[8..];
    if labels.len() != n {
        return Err(format_error(8 + labels.len().min(n), format!("expected {n} label bytes, found {}", labels.len())));
    }
    if let Some(i) = labels.iter().position(|&l| l > 9) {
        return Err(format_error(8 + i, format!("label {} is not a digit", labels[i])));
    }
    Ok(MnistDataset { images: pixels.iter().map(|&b| b as f64 / 255.0).collect(), labels: labels.to_vec() })
}

/// Encodes a dataset back into `(images, labels)` IDX bytes.
pub fn serialize_mnist(data: &MnistDataset) -> (Vec<u8>, Vec<u8>) {
    let n = data.len() as u32;
    let mut images = Vec::with_capacity(16 + data.images.len());
    for word in [IMAGES_MAGIC, n, 28, 28] {
        images.extend_from_slice(&word.to_be_bytes());
    }
    images.extend(data.images.iter().map(|&x| (x.clamp(0.0, 1.0) * 255.0).round() as u8));
    let mut labels = Vec::with_capacity(8 + data.labels.len());
    for word in [LABELS_MAGIC, n] {
        labels.extend_from_slice(&word.to_be_bytes());
    }
    labels.extend_from_slice(&data.labels);
    (images, labels)
}

/// Index of the largest value; ties go to the lowest index.
fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Indices of the fixed evaluation subset for `seed`.
fn subset(n: usize, size: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = index::sample(&mut rng, n, size).into_vec();
    idx.sort_unstable();
    idx
}

fn accuracy(net: &CompiledNetwork, data: &MnistDataset, indices: &[usize]) -> Result<f64, TaskError> {
    if net.obs_dim() != MNIST_PIXELS || net.action_dim() != 10 {
        return Err(TaskError::Contract(format!(
            "policy maps {} -> {} but MNIST needs {MNIST_PIXELS} -> 10",
            net.obs_dim(),
            net.action_dim()
        )));
    }
    if indices.is_empty() {
        return Ok(0.0);
    }
    let mut out = [0.0; 10];
    let mut correct = 0usize;
    for &i in indices {
        let mut state = net.reset();
        net.step(&mut state, data.image(i), &mut out)?;
        if argmax(&out) == data.labels[i] as usize {
            correct += 1;
        }
    }
    Ok(correct as f64 / indices.len() as f64)
}

/// Fraction of a seed-fixed subset of `subset_size` images classified
/// correctly, each image presented for a single control step.
pub fn mnist_fitness(
    genome: &Genome,
    spec: &NetworkSpec,
    data: &MnistDataset,
    subset_size: usize,
    seed: u64,
) -> Result<f64, TaskError> {
    if subset_size > data.len() {
        return Err(TaskError::Contract(format!("subset of {subset_size} from {} images", data.len())));
    }
    let net = CompiledNetwork::new(spec, genome)?;
    accuracy(&net, data, &subset(data.len(), subset_size, seed))
}

#[derive(Debug, Clone)]
pub struct MnistTask {
    spec: Arc<NetworkSpec>,
    data: Arc<MnistDataset>,
    indices: Arc<[usize]>,
}

impl MnistTask {
    pub fn new(
        spec: Arc<NetworkSpec>,
        data: Arc<MnistDataset>,
        subset_size: usize,
        seed: u64,
    ) -> Result<Self, TaskError> {
        if subset_size > data.len() {
            return Err(TaskError::Contract(format!("subset of {subset_size} from {} images", data.len())));
        }
        let indices = subset(data.len(), subset_size, seed).into();
        Ok(MnistTask { spec, data, indices })
    }

    pub fn subset(&self) -> &[usize] {
        &self.indices
    }
}

impl Task for MnistTask {
    fn evaluate(&self, genome: &Genome, _rng: &mut ChaCha8Rng) -> Result<f64, TaskError> {
        let net = CompiledNetwork::new(&self.spec, genome)?;
        accuracy(&net, &self.data, &self.indices)
    }
}
