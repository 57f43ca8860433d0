//! Amortized variational inference: a graph-convolution encoder produces a
//! factorized Gaussian over per-node Euclidean auxiliaries, which are mapped
//! deterministically into the latent space. The ELBO is maximized jointly over
//! the encoder weights and the global parameters with Adam.
//!
//! Full-batch: every epoch touches all `N(N−1)/2` pairs.

mod checkpoint;
mod elbo;
mod fit;
pub mod gcn;

pub use checkpoint::{Checkpoint, CheckpointHeader, Section, CHECKPOINT_FORMAT, CHECKPOINT_VERSION};
pub use elbo::{
    decode_to_disk, elbo, kl_divergence, ElboGradient, ElboNoise, ElboProblem, ElboTerms, GlobalParams, Globals,
    LatentModel, EUCLIDEAN_ALPHA_PRIOR_SD,
};
pub use fit::{
    fit_model, fit_vi, fit_vi_euclidean, posterior_predictive_probabilities, reconstruct_distances, reconstruct_probabilities, AdamState,
    VariationalConfig, VariationalFit, VariationalState,
};
pub use gcn::{gcn_encode, EncoderWeights, NodeGaussians, NormalizedAdjacency};
