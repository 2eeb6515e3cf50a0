//! Image reconstruction through a frozen decoder: the swarm-search method
//! (optimize a latent vector so the decoded image matches a target) and the
//! plain encode-then-decode baseline it is compared against.

use std::time::{Duration, Instant};

use crate::cso::{self, CsoParams, RunOptions};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::net::Network;

/// Outcome of one swarm-search reconstruction.
#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    /// The best latent vector found.
    pub best_latent: Vec<f64>,
    /// Exactly `decoder.forward(best_latent)`.
    pub reconstruction: Vec<f64>,
    /// Distance between target and reconstruction; equals the last history
    /// entry.
    pub final_fitness: f64,
    /// Best fitness per generation, non-increasing.
    pub fitness_history: Vec<f64>,
    pub generations_run: usize,
    pub wall_time: Duration,
}

/// Euclidean distance between two equal-length pixel vectors.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// The search objective: `||target - decoder(latent)||_2`.
pub fn fitness_of(decoder: &Network, latent: &[f64], target: &[f64]) -> Result<f64> {
    if latent.len() != decoder.input_width() {
        return Err(Error::dim("latent vector", decoder.input_width(), latent.len()));
    }
    if target.len() != decoder.output_width() {
        return Err(Error::dim("target image", decoder.output_width(), target.len()));
    }
    let decoded = decoder.forward(latent)?;
    Ok(euclidean_distance(target, &decoded))
}

/// Extra knobs for [`reconstruct_cso_with`].
#[derive(Clone, Debug, Default)]
pub struct ReconstructOptions {
    /// Injected as particle 0 of the initial swarm (ablation aid; the
    /// default swarm is purely random).
    pub warm_start: Option<Vec<f64>>,
    /// Early exit once the best fitness reaches this value.
    pub target_fitness: Option<f64>,
    pub exec: ExecMode,
}

/// Searches the decoder's latent space with the swarm optimizer and decodes
/// the best latent found. The decoder is read-only throughout.
pub fn reconstruct_cso(
    decoder: &Network,
    target: &[f64],
    params: &CsoParams,
) -> Result<ReconstructionResult> {
    reconstruct_cso_with(decoder, target, params, &ReconstructOptions::default())
}

pub fn reconstruct_cso_with(
    decoder: &Network,
    target: &[f64],
    params: &CsoParams,
    opts: &ReconstructOptions,
) -> Result<ReconstructionResult> {
    if params.dim != decoder.input_width() {
        return Err(Error::dim("swarm dimension", decoder.input_width(), params.dim));
    }
    if target.len() != decoder.output_width() {
        return Err(Error::dim("target image", decoder.output_width(), target.len()));
    }
    let start = Instant::now();
    let objective = |latent: &[f64]| {
        let decoded = decoder
            .forward(latent)
            .expect("latent dimension checked against the decoder");
        euclidean_distance(target, &decoded)
    };
    let run_opts = RunOptions {
        warm_start: opts.warm_start.clone(),
        target_fitness: opts.target_fitness,
        exec: opts.exec,
    };
    let (best, fitness_history) = cso::run_with(params, objective, &run_opts)?;
    let reconstruction = decoder.forward(&best.position)?;
    Ok(ReconstructionResult {
        final_fitness: best.fitness.expect("run always evaluates its best"),
        best_latent: best.position,
        reconstruction,
        generations_run: fitness_history.len() - 1,
        fitness_history,
        wall_time: start.elapsed(),
    })
}

/// The baseline: feed the target through the whole autoencoder and measure
/// the same distance the swarm search minimizes.
pub fn reconstruct_ae(autoencoder: &Network, target: &[f64]) -> Result<(Vec<f64>, f64)> {
    let reconstruction = autoencoder.forward(target)?;
    let error = euclidean_distance(target, &reconstruction);
    Ok((reconstruction, error))
}
