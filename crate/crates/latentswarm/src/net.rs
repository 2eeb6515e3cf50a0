//! Fully-connected sigmoid networks: initialization, forward passes,
//! mini-batch gradient-descent training on the reconstruction error, and
//! encoder/decoder splitting at the bottleneck.
//!
//! All arithmetic is `f64` and every reduction uses a fixed summation order,
//! so identical inputs give bit-identical outputs on every run.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::data::ImageDataset;
use crate::error::{Error, Result};

/// Shape of one dense layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LayerSpec {
    pub in_nodes: usize,
    pub out_nodes: usize,
}

impl LayerSpec {
    pub fn new(in_nodes: usize, out_nodes: usize) -> Result<Self> {
        if in_nodes == 0 || out_nodes == 0 {
            return Err(Error::config("layer widths must be positive"));
        }
        Ok(LayerSpec {
            in_nodes,
            out_nodes,
        })
    }

    /// Half-width of the uniform initialization interval: `2 / sqrt(in + out)`.
    pub fn init_bound(&self) -> f64 {
        2.0 / ((self.in_nodes + self.out_nodes) as f64).sqrt()
    }
}

/// Weights and biases of one dense layer. Weights are row-major with shape
/// `(out_nodes, in_nodes)`: row `o` holds the incoming weights of output
/// unit `o`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseLayer {
    in_nodes: usize,
    out_nodes: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl DenseLayer {
    /// Uniform weight initialization with every weight strictly inside
    /// `(-2/sqrt(in+out), +2/sqrt(in+out))`; biases start at zero.
    pub fn xavier(spec: LayerSpec, rng: &mut impl Rng) -> DenseLayer {
        let bound = spec.init_bound();
        let weights = (0..spec.in_nodes * spec.out_nodes)
            .map(|_| loop {
                let w = bound * (2.0 * rng.random::<f64>() - 1.0);
                if w.abs() < bound {
                    break w;
                }
            })
            .collect();
        DenseLayer {
            in_nodes: spec.in_nodes,
            out_nodes: spec.out_nodes,
            weights,
            biases: vec![0.0; spec.out_nodes],
        }
    }

    pub fn from_parts(
        in_nodes: usize,
        out_nodes: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
    ) -> Result<DenseLayer> {
        if weights.len() != in_nodes * out_nodes {
            return Err(Error::dim("layer weights", in_nodes * out_nodes, weights.len()));
        }
        if biases.len() != out_nodes {
            return Err(Error::dim("layer biases", out_nodes, biases.len()));
        }
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::config("layer parameters must be finite"));
        }
        Ok(DenseLayer {
            in_nodes,
            out_nodes,
            weights,
            biases,
        })
    }

    pub fn in_nodes(&self) -> usize {
        self.in_nodes
    }

    pub fn out_nodes(&self) -> usize {
        self.out_nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    fn forward_into(&self, input: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.out_nodes {
            let row = &self.weights[o * self.in_nodes..(o + 1) * self.in_nodes];
            out.push(sigmoid(self.biases[o] + dot(row, input)));
        }
    }
}

/// Numerically stable logistic function `1 / (1 + exp(-x))`.
///
/// Finite and inside `(0, 1]` for any finite input; the `x < 0` branch
/// avoids overflow for large negative arguments.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

// Dot product with a fixed 4-lane summation tree. The explicit unroll keeps
// the reduction order deterministic while letting the compiler vectorize.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let tail: f64 = ca
        .remainder()
        .iter()
        .zip(cb.remainder())
        .map(|(x, y)| x * y)
        .sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Training hyperparameters for gradient descent.
#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            epochs: 30,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::config(format!(
                "learning rate must be finite and >= 0, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch size must be >= 1"));
        }
        Ok(())
    }
}

/// A chain of dense sigmoid layers.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    layers: Vec<DenseLayer>,
}

impl Network {
    /// Builds a network from explicit layers, checking that consecutive
    /// shapes chain.
    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Network> {
        if layers.is_empty() {
            return Err(Error::config("network needs at least one layer"));
        }
        for pair in layers.windows(2) {
            if pair[0].out_nodes != pair[1].in_nodes {
                return Err(Error::dim(
                    "layer chain",
                    pair[0].out_nodes,
                    pair[1].in_nodes,
                ));
            }
        }
        Ok(Network { layers })
    }

    /// Xavier-initialized network from a width list such as `[784, 30, 784]`.
    pub fn new(widths: &[usize], rng: &mut impl Rng) -> Result<Network> {
        if widths.len() < 2 {
            return Err(Error::config("need at least two widths"));
        }
        let layers = widths
            .windows(2)
            .map(|w| Ok(DenseLayer::xavier(LayerSpec::new(w[0], w[1])?, rng)))
            .collect::<Result<Vec<_>>>()?;
        Network::from_layers(layers)
    }

    /// Like [`Network::new`] but additionally requires equal input and
    /// output widths, as an autoencoder must reproduce its input.
    pub fn autoencoder(widths: &[usize], rng: &mut impl Rng) -> Result<Network> {
        if widths.len() < 2 || widths.first() != widths.last() {
            return Err(Error::config(format!(
                "autoencoder widths must start and end with the same value, got {widths:?}"
            )));
        }
        Network::new(widths, rng)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    /// Layer widths including input and output, e.g. `[784, 30, 784]`.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.layers.len() + 1);
        w.push(self.layers[0].in_nodes);
        w.extend(self.layers.iter().map(|l| l.out_nodes));
        w
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].in_nodes
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().unwrap().out_nodes
    }

    /// Runs the network and returns the output activation.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.input_width() {
            return Err(Error::dim("forward input", self.input_width(), input.len()));
        }
        let mut current = input.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers {
            layer.forward_into(&current, &mut next);
            std::mem::swap(&mut current, &mut next);
        }
        Ok(current)
    }

    /// Runs the network and returns every activation, `trace[0]` being the
    /// input and `trace.last()` the output. Feeds backpropagation.
    pub fn forward_trace(&self, input: &[f64]) -> Result<Vec<Vec<f64>>> {
        if input.len() != self.input_width() {
            return Err(Error::dim("forward input", self.input_width(), input.len()));
        }
        let mut trace = Vec::with_capacity(self.layers.len() + 1);
        trace.push(input.to_vec());
        for layer in &self.layers {
            let mut out = Vec::new();
            layer.forward_into(trace.last().unwrap(), &mut out);
            trace.push(out);
        }
        Ok(trace)
    }

    // Per-image squared-error loss and parameter gradients, accumulated
    // into `grads`. Returns the loss 0.5 * ||target - output||^2.
    fn accumulate_gradients(&self, image: &[f64], grads: &mut [LayerGrad]) -> f64 {
        let trace = self
            .forward_trace(image)
            .expect("image width checked at training entry");
        let output = trace.last().unwrap();
        let loss: f64 = output
            .iter()
            .zip(image)
            .map(|(o, t)| (o - t) * (o - t))
            .sum::<f64>()
            * 0.5;

        // delta = dLoss/dz for the current layer, starting at the output.
        let mut delta: Vec<f64> = output
            .iter()
            .zip(image)
            .map(|(o, t)| (o - t) * o * (1.0 - o))
            .collect();
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let prev = &trace[l];
            let grad = &mut grads[l];
            for o in 0..layer.out_nodes {
                let d = delta[o];
                let row = &mut grad.weights[o * layer.in_nodes..(o + 1) * layer.in_nodes];
                for (g, a) in row.iter_mut().zip(prev) {
                    *g += d * a;
                }
                grad.biases[o] += d;
            }
            if l > 0 {
                let mut back = vec![0.0; layer.in_nodes];
                for o in 0..layer.out_nodes {
                    let d = delta[o];
                    let row = &layer.weights[o * layer.in_nodes..(o + 1) * layer.in_nodes];
                    for (b, w) in back.iter_mut().zip(row) {
                        *b += w * d;
                    }
                }
                for (b, a) in back.iter_mut().zip(prev) {
                    *b *= a * (1.0 - a);
                }
                delta = back;
            }
        }
        loss
    }

    /// One epoch of mini-batch gradient descent on the reconstruction error
    /// `0.5 * ||image - net(image)||^2`, batches drawn in a seeded shuffled
    /// order. Returns the epoch's mean per-image loss (measured before each
    /// batch's update).
    pub fn train_epoch(
        &mut self,
        data: &ImageDataset,
        cfg: &TrainConfig,
        rng: &mut impl Rng,
    ) -> Result<f64> {
        cfg.validate()?;
        if data.is_empty() {
            return Err(Error::config("training dataset is empty"));
        }
        if data.pixel_count() != self.input_width() {
            return Err(Error::dim(
                "training image",
                self.input_width(),
                data.pixel_count(),
            ));
        }
        if self.output_width() != self.input_width() {
            return Err(Error::dim(
                "autoencoder output",
                self.input_width(),
                self.output_width(),
            ));
        }

        let mut order: Vec<usize> = (0..data.len()).collect();
        for i in (1..order.len()).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }

        let mut grads: Vec<LayerGrad> = self.layers.iter().map(LayerGrad::zero_like).collect();
        let mut loss_sum = 0.0;
        for (batch_index, batch) in order.chunks(cfg.batch_size).enumerate() {
            for g in &mut grads {
                g.clear();
            }
            let mut batch_loss = 0.0;
            for &i in batch {
                batch_loss += self.accumulate_gradients(data.image(i), &mut grads);
            }
            if !batch_loss.is_finite() {
                return Err(Error::Divergence { batch: batch_index });
            }
            loss_sum += batch_loss;
            let scale = cfg.learning_rate / batch.len() as f64;
            for (layer, grad) in self.layers.iter_mut().zip(&grads) {
                for (w, g) in layer.weights.iter_mut().zip(&grad.weights) {
                    *w -= scale * g;
                }
                for (b, g) in layer.biases.iter_mut().zip(&grad.biases) {
                    *b -= scale * g;
                }
            }
        }
        Ok(loss_sum / data.len() as f64)
    }

    /// Runs `cfg.epochs` epochs with a ChaCha stream seeded from `cfg.seed`
    /// and returns the per-epoch mean losses.
    pub fn train(&mut self, data: &ImageDataset, cfg: &TrainConfig) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..cfg.epochs)
            .map(|_| self.train_epoch(data, cfg, &mut rng))
            .collect()
    }

    /// Index of the narrowest interior activation, for splitting. Ties are
    /// broken toward the middle of the network, then toward the input.
    pub fn bottleneck_index(&self) -> usize {
        let widths = self.widths();
        let interior = 1..widths.len() - 1;
        let mid = (widths.len() - 1) as f64 / 2.0;
        interior
            .min_by(|&a, &b| {
                widths[a]
                    .cmp(&widths[b])
                    .then(((a as f64 - mid).abs()).total_cmp(&(b as f64 - mid).abs()))
                    .then(a.cmp(&b))
            })
            .expect("networks have at least one layer")
    }

    /// Splits into `(encoder, decoder)` at the given activation index:
    /// the encoder holds layers `0..index`, the decoder `index..`.
    /// `decoder(encoder(x))` reproduces `forward(x)` exactly.
    pub fn split(&self, index: usize) -> Result<(Network, Network)> {
        if index == 0 || index >= self.layers.len() {
            return Err(Error::config(format!(
                "split index {index} out of range 1..{}",
                self.layers.len()
            )));
        }
        let encoder = Network {
            layers: self.layers[..index].to_vec(),
        };
        let decoder = Network {
            layers: self.layers[index..].to_vec(),
        };
        Ok((encoder, decoder))
    }

    /// [`Network::split`] at the detected bottleneck.
    pub fn split_auto(&self) -> Result<(Network, Network)> {
        self.split(self.bottleneck_index())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = BufWriter::new(File::create(path)?);
        self.save_to(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn save_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.layers.len() as u32).to_le_bytes())?;
        for layer in &self.layers {
            w.write_all(&(layer.in_nodes as u32).to_le_bytes())?;
            w.write_all(&(layer.out_nodes as u32).to_le_bytes())?;
            for v in layer.weights.iter().chain(&layer.biases) {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Network> {
        let label = path.as_ref().display().to_string();
        let mut file = BufReader::new(File::open(path.as_ref())?);
        Network::load_from(&mut file, &label)
    }

    pub fn load_from<R: Read>(r: &mut R, label: &str) -> Result<Network> {
        let mut magic = [0u8; 4];
        read_exact(r, &mut magic, label)?;
        if &magic != MAGIC {
            return Err(Error::Format {
                path: label.to_string(),
                reason: format!("bad magic bytes {magic:?}, expected {MAGIC:?}"),
            });
        }
        let version = read_u32(r, label)?;
        if version != FORMAT_VERSION {
            return Err(Error::Format {
                path: label.to_string(),
                reason: format!("unsupported format version {version}"),
            });
        }
        let layer_count = read_u32(r, label)? as usize;
        if layer_count == 0 || layer_count > 64 {
            return Err(Error::Format {
                path: label.to_string(),
                reason: format!("implausible layer count {layer_count}"),
            });
        }
        let mut layers = Vec::with_capacity(layer_count);
        for _ in 0..layer_count {
            let in_nodes = read_u32(r, label)? as usize;
            let out_nodes = read_u32(r, label)? as usize;
            if !(1..=1_000_000).contains(&in_nodes) || !(1..=1_000_000).contains(&out_nodes) {
                return Err(Error::Format {
                    path: label.to_string(),
                    reason: format!("implausible layer shape {in_nodes}x{out_nodes}"),
                });
            }
            let mut weights = vec![0.0; in_nodes * out_nodes];
            for w in &mut weights {
                *w = read_f64(r, label)?;
            }
            let mut biases = vec![0.0; out_nodes];
            for b in &mut biases {
                *b = read_f64(r, label)?;
            }
            layers.push(DenseLayer {
                in_nodes,
                out_nodes,
                weights,
                biases,
            });
        }
        Network::from_layers(layers)
    }
}

const MAGIC: &[u8; 4] = b"AENC";
const FORMAT_VERSION: u32 = 1;

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], label: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == std::io::ErrorKind::UnexpectedEof {
            Error::Corrupt {
                path: label.to_string(),
                reason: "file ends before the declared payload".to_string(),
            }
        } else {
            Error::Io(e)
        }
    })
}

fn read_u32<R: Read>(r: &mut R, label: &str) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf, label)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64<R: Read>(r: &mut R, label: &str) -> Result<f64> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf, label)?;
    Ok(f64::from_le_bytes(buf))
}

struct LayerGrad {
    weights: Vec<f64>,
    biases: Vec<f64>,
}

impl LayerGrad {
    fn zero_like(layer: &DenseLayer) -> LayerGrad {
        LayerGrad {
            weights: vec![0.0; layer.weights.len()],
            biases: vec![0.0; layer.biases.len()],
        }
    }

    fn clear(&mut self) {
        self.weights.iter_mut().for_each(|v| *v = 0.0);
        self.biases.iter_mut().for_each(|v| *v = 0.0);
    }
}

/// Maps an architecture preset name to its width list.
pub fn preset(name: &str) -> Option<Vec<usize>> {
    match name {
        "mnist-30" => Some(vec![784, 30, 784]),
        "mnist-250" => Some(vec![784, 250, 784]),
        "mnist-deep" => Some(vec![784, 1000, 500, 256, 30, 256, 500, 1000, 784]),
        "faces-30" => Some(vec![484, 30, 484]),
        "faces-300" => Some(vec![484, 300, 484]),
        _ => None,
    }
}

/// All preset names, for CLI help and validation messages.
pub fn preset_names() -> &'static [&'static str] {
    &["mnist-30", "mnist-250", "mnist-deep", "faces-30", "faces-300"]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn dataset(images: Vec<Vec<f64>>, width: usize, height: usize) -> ImageDataset {
        ImageDataset::new(images, width, height, None).unwrap()
    }

    #[test]
    fn xavier_bound_values() {
        // 2/sqrt(814) and 2/sqrt(2), evaluated independently beforehand.
        let wide = LayerSpec::new(784, 30).unwrap();
        assert!((wide.init_bound() - 0.0700999637).abs() < 1e-9);
        let tiny = LayerSpec::new(1, 1).unwrap();
        assert!((tiny.init_bound() - 1.4142135624).abs() < 1e-9);
    }

    #[test]
    fn xavier_weights_strictly_inside_bound_and_biases_zero() {
        let spec = LayerSpec::new(784, 30).unwrap();
        let layer = DenseLayer::xavier(spec, &mut rng(4));
        let bound = spec.init_bound();
        assert!(layer.weights().iter().all(|w| w.abs() < bound));
        assert!(layer.biases().iter().all(|&b| b == 0.0));
        assert_eq!(layer.weights().len(), 784 * 30);
    }

    #[test]
    fn sigmoid_basics() {
        assert_eq!(sigmoid(0.0), 0.5);
        for x in [-3.7, -0.5, 0.0, 1.2, 9.9] {
            assert!((sigmoid(x) - (1.0 - sigmoid(-x))).abs() < 1e-15);
        }
        let hi = sigmoid(500.0);
        assert!(hi.is_finite() && hi > 0.0 && hi <= 1.0);
        let lo = sigmoid(-500.0);
        assert!(lo.is_finite() && lo > 0.0 && lo < 1.0);
    }

    #[test]
    fn forward_with_zero_parameters_gives_half_everywhere() {
        let layers = vec![
            DenseLayer::from_parts(3, 4, vec![0.0; 12], vec![0.0; 4]).unwrap(),
            DenseLayer::from_parts(4, 2, vec![0.0; 8], vec![0.0; 2]).unwrap(),
        ];
        let net = Network::from_layers(layers).unwrap();
        let out = net.forward(&[0.9, 0.1, 0.4]).unwrap();
        assert_eq!(out, vec![0.5, 0.5]);
    }

    #[test]
    fn forward_single_unit() {
        let net = Network::from_layers(vec![
            DenseLayer::from_parts(1, 1, vec![1.0], vec![0.0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(net.forward(&[0.0]).unwrap(), vec![0.5]);
    }

    #[test]
    fn forward_output_shape_and_range() {
        let net = Network::new(&[6, 3, 6], &mut rng(8)).unwrap();
        let out = net.forward(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).unwrap();
        assert_eq!(out.len(), 6);
        assert!(out.iter().all(|&v| v > 0.0 && v < 1.0));
        assert!(matches!(
            net.forward(&[0.0; 5]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn zero_learning_rate_leaves_network_unchanged() {
        let mut net = Network::new(&[4, 2, 4], &mut rng(9)).unwrap();
        let before = net.clone();
        let data = dataset(vec![vec![0.2; 4], vec![0.8; 4]], 2, 2);
        let cfg = TrainConfig {
            learning_rate: 0.0,
            epochs: 1,
            batch_size: 2,
            seed: 0,
        };
        net.train_epoch(&data, &cfg, &mut rng(0)).unwrap();
        assert_eq!(net, before);
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        // 6-4-6 with 3 images; the oracle perturbs each parameter by
        // +/- 1e-4 and differences the mean loss through `forward` only.
        let net = Network::new(&[6, 4, 6], &mut rng(12)).unwrap();
        let mut source = rng(13);
        let images: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..6).map(|_| source.random::<f64>()).collect())
            .collect();
        let data = dataset(images.clone(), 6, 1);

        // One full-batch update at lr=1 turns the weight delta into the
        // analytic mean-gradient.
        let mut trained = net.clone();
        let cfg = TrainConfig {
            learning_rate: 1.0,
            epochs: 1,
            batch_size: 3,
            seed: 0,
        };
        trained.train_epoch(&data, &cfg, &mut rng(0)).unwrap();

        let mean_loss = |candidate: &Network| -> f64 {
            images
                .iter()
                .map(|img| {
                    let out = candidate.forward(img).unwrap();
                    out.iter()
                        .zip(img)
                        .map(|(o, t)| (o - t) * (o - t))
                        .sum::<f64>()
                        * 0.5
                })
                .sum::<f64>()
                / images.len() as f64
        };

        let eps = 1e-4;
        let mut worst = 0.0f64;
        for l in 0..net.layers().len() {
            let params = net.layers()[l].weights().len() + net.layers()[l].biases().len();
            for p in 0..params {
                let perturb = |delta: f64| -> Network {
                    let mut layers = net.layers().to_vec();
                    let layer = &layers[l];
                    let mut weights = layer.weights().to_vec();
                    let mut biases = layer.biases().to_vec();
                    if p < weights.len() {
                        weights[p] += delta;
                    } else {
                        biases[p - weights.len()] += delta;
                    }
                    layers[l] =
                        DenseLayer::from_parts(layer.in_nodes(), layer.out_nodes(), weights, biases)
                            .unwrap();
                    Network::from_layers(layers).unwrap()
                };
                let numeric = (mean_loss(&perturb(eps)) - mean_loss(&perturb(-eps))) / (2.0 * eps);
                let analytic = if p < net.layers()[l].weights().len() {
                    net.layers()[l].weights()[p] - trained.layers()[l].weights()[p]
                } else {
                    let q = p - net.layers()[l].weights().len();
                    net.layers()[l].biases()[q] - trained.layers()[l].biases()[q]
                };
                let rel = (numeric - analytic).abs() / (numeric.abs() + analytic.abs()).max(1e-8);
                worst = worst.max(rel);
            }
        }
        assert!(worst < 1e-4, "max relative gradient error {worst}");
    }

    #[test]
    fn training_lowers_the_loss() {
        // 16-4-16 on 8 fixed random images; a reference run confirms the
        // mean loss drops over 20 epochs.
        let mut source = rng(11);
        let images: Vec<Vec<f64>> = (0..8)
            .map(|_| (0..16).map(|_| source.random::<f64>()).collect())
            .collect();
        let data = dataset(images, 4, 4);
        let mut net = Network::new(&[16, 4, 16], &mut rng(14)).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.1,
            epochs: 20,
            batch_size: 4,
            seed: 5,
        };
        let losses = net.train(&data, &cfg).unwrap();
        assert!(losses.last().unwrap() < &losses[0]);
    }

    #[test]
    fn split_shallow_architecture() {
        let net = Network::new(&[784, 30, 784], &mut rng(15)).unwrap();
        assert_eq!(net.bottleneck_index(), 1);
        let (encoder, decoder) = net.split_auto().unwrap();
        assert_eq!(encoder.widths(), vec![784, 30]);
        assert_eq!(decoder.widths(), vec![30, 784]);
    }

    #[test]
    fn split_deep_architecture_finds_latent_width() {
        let widths = preset("mnist-deep").unwrap();
        let net = Network::new(&widths, &mut rng(16)).unwrap();
        let (_, decoder) = net.split_auto().unwrap();
        assert_eq!(decoder.input_width(), 30);
        assert_eq!(decoder.widths(), vec![30, 256, 500, 1000, 784]);
    }

    #[test]
    fn split_compose_reproduces_forward_exactly() {
        let net = Network::new(&[10, 6, 3, 6, 10], &mut rng(17)).unwrap();
        let (encoder, decoder) = net.split_auto().unwrap();
        let mut source = rng(18);
        for _ in 0..10 {
            let input: Vec<f64> = (0..10).map(|_| source.random::<f64>()).collect();
            let whole = net.forward(&input).unwrap();
            let composed = decoder.forward(&encoder.forward(&input).unwrap()).unwrap();
            assert_eq!(whole, composed);
        }
    }

    #[test]
    fn split_rejects_out_of_range_index() {
        let net = Network::new(&[4, 2, 4], &mut rng(19)).unwrap();
        assert!(net.split(0).is_err());
        assert!(net.split(2).is_err());
        assert!(net.split(1).is_ok());
    }

    #[test]
    fn save_load_roundtrip_is_bit_identical() {
        let net = Network::new(&[12, 5, 12], &mut rng(20)).unwrap();
        let mut bytes = Vec::new();
        net.save_to(&mut bytes).unwrap();
        let loaded = Network::load_from(&mut bytes.as_slice(), "buffer").unwrap();
        assert_eq!(net, loaded);
    }

    #[test]
    fn load_rejects_truncation_and_bad_magic() {
        let net = Network::new(&[4, 2, 4], &mut rng(21)).unwrap();
        let mut bytes = Vec::new();
        net.save_to(&mut bytes).unwrap();

        let cut = &bytes[..bytes.len() / 2];
        assert!(matches!(
            Network::load_from(&mut &cut[..], "buffer"),
            Err(Error::Corrupt { .. })
        ));

        let mut wrong = bytes.clone();
        wrong[0] = b'X';
        assert!(matches!(
            Network::load_from(&mut wrong.as_slice(), "buffer"),
            Err(Error::Format { .. })
        ));

        let mut bad_version = bytes;
        bad_version[4] = 9;
        assert!(matches!(
            Network::load_from(&mut bad_version.as_slice(), "buffer"),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn presets_match_published_architectures() {
        assert_eq!(preset("mnist-30").unwrap(), vec![784, 30, 784]);
        assert_eq!(preset("faces-300").unwrap(), vec![484, 300, 484]);
        assert_eq!(preset("mnist-deep").unwrap().len(), 9);
        assert!(preset("unknown").is_none());
    }
}
