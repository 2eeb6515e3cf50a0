//! Train small fully-connected sigmoid autoencoders, then reconstruct unseen
//! images by searching the trained decoder's latent space with a competitive
//! swarm optimizer, and benchmark that search against the plain
//! encode-then-decode baseline.
//!
//! The crate is organized around the pipeline:
//!
//! - [`data`]: IDX/PGM ingestion, min-max normalization, the face
//!   rotation/subsampling augmentation, and seeded synthetic corpora.
//! - [`net`]: dense sigmoid networks with backprop training and
//!   encoder/decoder splitting; [`rbm`] adds optional greedy layer-wise
//!   pre-training.
//! - [`cso`]: the generic competitive swarm optimizer.
//! - [`recon`]: both reconstruction methods over a frozen decoder.
//! - [`eval`]: CLI-facing orchestration emitting CSV reports, PGM grids, and
//!   JSON run manifests.
//!
//! Every random decision flows from explicit 64-bit seeds through
//! per-item derived streams ([`seed::derive_seed`]), so any run — and any
//! single image inside a run — reproduces exactly. With the `parallel`
//! feature (default) the fitness evaluations and per-image comparisons run
//! on rayon; results are identical to the sequential fallback.

pub mod cso;
pub mod data;
pub mod error;
mod exec;
pub mod eval;
pub mod net;
pub mod rbm;
pub mod recon;
pub mod seed;

pub use error::{Error, Result};
pub use exec::ExecMode;
