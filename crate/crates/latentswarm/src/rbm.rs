//! Restricted Boltzmann Machine primitives: the energy function, conditional
//! unit probabilities, single-step contrastive divergence, and greedy
//! layer-wise pre-training that unfolds a stack of RBMs into an autoencoder
//! ready for backprop fine-tuning.

use rand::Rng;

use crate::data::ImageDataset;
use crate::error::{Error, Result};
use crate::net::{sigmoid, DenseLayer, LayerSpec, Network, TrainConfig};

/// Symmetrically connected two-layer network. Weights are row-major with
/// shape `(hidden, visible)`: row `j` holds hidden unit `j`'s connections.
#[derive(Clone, Debug, PartialEq)]
pub struct Rbm {
    visible: usize,
    hidden: usize,
    weights: Vec<f64>,
    visible_bias: Vec<f64>,
    hidden_bias: Vec<f64>,
}

impl Rbm {
    /// Uniformly initialized weights (same bound as dense layers), zero biases.
    pub fn new(visible: usize, hidden: usize, rng: &mut impl Rng) -> Result<Rbm> {
        let spec = LayerSpec::new(visible, hidden)?;
        let layer = DenseLayer::xavier(spec, rng);
        Ok(Rbm {
            visible,
            hidden,
            weights: layer.weights().to_vec(),
            visible_bias: vec![0.0; visible],
            hidden_bias: vec![0.0; hidden],
        })
    }

    pub fn from_parts(
        visible: usize,
        hidden: usize,
        weights: Vec<f64>,
        visible_bias: Vec<f64>,
        hidden_bias: Vec<f64>,
    ) -> Result<Rbm> {
        if weights.len() != visible * hidden {
            return Err(Error::dim("rbm weights", visible * hidden, weights.len()));
        }
        if visible_bias.len() != visible {
            return Err(Error::dim("rbm visible bias", visible, visible_bias.len()));
        }
        if hidden_bias.len() != hidden {
            return Err(Error::dim("rbm hidden bias", hidden, hidden_bias.len()));
        }
        Ok(Rbm {
            visible,
            hidden,
            weights,
            visible_bias,
            hidden_bias,
        })
    }

    pub fn visible(&self) -> usize {
        self.visible
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn visible_bias(&self) -> &[f64] {
        &self.visible_bias
    }

    pub fn hidden_bias(&self) -> &[f64] {
        &self.hidden_bias
    }

    /// The RBM with visible and hidden roles exchanged (transposed weights,
    /// swapped biases).
    pub fn transposed(&self) -> Rbm {
        let mut weights = vec![0.0; self.weights.len()];
        for j in 0..self.hidden {
            for i in 0..self.visible {
                weights[i * self.hidden + j] = self.weights[j * self.visible + i];
            }
        }
        Rbm {
            visible: self.hidden,
            hidden: self.visible,
            weights,
            visible_bias: self.hidden_bias.clone(),
            hidden_bias: self.visible_bias.clone(),
        }
    }

    /// Joint energy `-sum(b_i v_i) - sum(b_j h_j) - sum(v_i h_j w_ij)`.
    pub fn energy(&self, v: &[f64], h: &[f64]) -> Result<f64> {
        if v.len() != self.visible {
            return Err(Error::dim("energy visible", self.visible, v.len()));
        }
        if h.len() != self.hidden {
            return Err(Error::dim("energy hidden", self.hidden, h.len()));
        }
        let mut e = 0.0;
        for (b, x) in self.visible_bias.iter().zip(v) {
            e -= b * x;
        }
        for (b, x) in self.hidden_bias.iter().zip(h) {
            e -= b * x;
        }
        for j in 0..self.hidden {
            let row = &self.weights[j * self.visible..(j + 1) * self.visible];
            let mut s = 0.0;
            for (w, x) in row.iter().zip(v) {
                s += w * x;
            }
            e -= h[j] * s;
        }
        Ok(e)
    }

    /// `p(h_j = 1 | v)` for every hidden unit.
    pub fn hidden_probability(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.visible {
            return Err(Error::dim("hidden probability", self.visible, v.len()));
        }
        Ok((0..self.hidden)
            .map(|j| {
                let row = &self.weights[j * self.visible..(j + 1) * self.visible];
                let mut s = self.hidden_bias[j];
                for (w, x) in row.iter().zip(v) {
                    s += w * x;
                }
                sigmoid(s)
            })
            .collect())
    }

    /// `p(v_i = 1 | h)` for every visible unit.
    pub fn visible_probability(&self, h: &[f64]) -> Result<Vec<f64>> {
        if h.len() != self.hidden {
            return Err(Error::dim("visible probability", self.hidden, h.len()));
        }
        let mut s = self.visible_bias.clone();
        for j in 0..self.hidden {
            let row = &self.weights[j * self.visible..(j + 1) * self.visible];
            let hj = h[j];
            for (acc, w) in s.iter_mut().zip(row) {
                *acc += hj * w;
            }
        }
        Ok(s.into_iter().map(sigmoid).collect())
    }

    /// One contrastive-divergence step over a batch: sample `h0` from the
    /// data, reconstruct `v1` as real-valued probabilities, compute `h1`
    /// probabilities, and move the parameters along the averaged statistics
    /// gap.
    pub fn cd1_update(
        &mut self,
        batch: &[&[f64]],
        learning_rate: f64,
        rng: &mut impl Rng,
    ) -> Result<()> {
        if batch.is_empty() {
            return Err(Error::config("CD-1 batch is empty"));
        }
        let mut grad_w = vec![0.0; self.weights.len()];
        let mut grad_bv = vec![0.0; self.visible];
        let mut grad_bh = vec![0.0; self.hidden];
        for &v0 in batch {
            if v0.len() != self.visible {
                return Err(Error::dim("cd1 image", self.visible, v0.len()));
            }
            let ph0 = self.hidden_probability(v0)?;
            let h0 = sample_bernoulli(&ph0, rng);
            let v1 = self.visible_probability(&h0)?;
            let ph1 = self.hidden_probability(&v1)?;
            for j in 0..self.hidden {
                let row = &mut grad_w[j * self.visible..(j + 1) * self.visible];
                for i in 0..self.visible {
                    row[i] += h0[j] * v0[i] - ph1[j] * v1[i];
                }
            }
            for i in 0..self.visible {
                grad_bv[i] += v0[i] - v1[i];
            }
            for j in 0..self.hidden {
                grad_bh[j] += h0[j] - ph1[j];
            }
        }
        let scale = learning_rate / batch.len() as f64;
        for (w, g) in self.weights.iter_mut().zip(&grad_w) {
            *w += scale * g;
        }
        for (b, g) in self.visible_bias.iter_mut().zip(&grad_bv) {
            *b += scale * g;
        }
        for (b, g) in self.hidden_bias.iter_mut().zip(&grad_bh) {
            *b += scale * g;
        }
        if self
            .weights
            .iter()
            .chain(&self.visible_bias)
            .chain(&self.hidden_bias)
            .any(|x| !x.is_finite())
        {
            return Err(Error::Divergence { batch: 0 });
        }
        Ok(())
    }

    /// Mean `||v0 - v1||` over a batch for one stochastic down-up pass.
    pub fn reconstruction_error(&self, batch: &[&[f64]], rng: &mut impl Rng) -> Result<f64> {
        let mut total = 0.0;
        for &v0 in batch {
            let ph0 = self.hidden_probability(v0)?;
            let h0 = sample_bernoulli(&ph0, rng);
            let v1 = self.visible_probability(&h0)?;
            total += v0
                .iter()
                .zip(&v1)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
        }
        Ok(total / batch.len() as f64)
    }
}

/// Independent Bernoulli draws, returned as 0.0/1.0 values.
pub fn sample_bernoulli(probs: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    probs
        .iter()
        .map(|&p| if rng.random::<f64>() < p { 1.0 } else { 0.0 })
        .collect()
}

/// Greedy layer-wise pre-training of one RBM per consecutive width pair,
/// each trained on the previous level's hidden probabilities, then unfolded
/// into a full autoencoder: decoder weights are the transposed encoder
/// weights with the RBMs' visible biases.
///
/// `widths` describes the encoder half including the input, e.g. `[784, 30]`.
pub fn pretrain_stack(
    widths: &[usize],
    data: &ImageDataset,
    cfg: &TrainConfig,
    rng: &mut impl Rng,
) -> Result<Network> {
    if widths.len() < 2 {
        return Err(Error::config("need at least two widths to pretrain"));
    }
    cfg.validate()?;
    if data.pixel_count() != widths[0] {
        return Err(Error::dim("pretraining image", widths[0], data.pixel_count()));
    }

    let mut level: Vec<Vec<f64>> = data.images().to_vec();
    let mut rbms = Vec::with_capacity(widths.len() - 1);
    for pair in widths.windows(2) {
        let mut rbm = Rbm::new(pair[0], pair[1], rng)?;
        let mut order: Vec<usize> = (0..level.len()).collect();
        for _ in 0..cfg.epochs {
            for i in (1..order.len()).rev() {
                let j = rng.random_range(0..=i);
                order.swap(i, j);
            }
            for chunk in order.chunks(cfg.batch_size) {
                let batch: Vec<&[f64]> = chunk.iter().map(|&i| level[i].as_slice()).collect();
                rbm.cd1_update(&batch, cfg.learning_rate, rng)?;
            }
        }
        level = level
            .iter()
            .map(|v| rbm.hidden_probability(v))
            .collect::<Result<_>>()?;
        rbms.push(rbm);
    }

    let mut layers = Vec::with_capacity(2 * rbms.len());
    for rbm in &rbms {
        layers.push(DenseLayer::from_parts(
            rbm.visible,
            rbm.hidden,
            rbm.weights.clone(),
            rbm.hidden_bias.clone(),
        )?);
    }
    for rbm in rbms.iter().rev() {
        let t = rbm.transposed();
        layers.push(DenseLayer::from_parts(
            rbm.hidden,
            rbm.visible,
            t.weights,
            rbm.visible_bias.clone(),
        )?);
    }
    Network::from_layers(layers)
}
