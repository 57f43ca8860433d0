//! Continuous latent space network models with hyperbolic, Euclidean and
//! spherical geometries and a learnable link temperature.
//!
//! - [`geometry`]: sampling and distance kernels.
//! - [`generative`]: forward simulation and density calibration.
//! - [`graph`]: graph type, edge lists and the tree-likeness metric panel.
//! - [`hmc`]: full posterior inference by Hamiltonian Monte Carlo.
//! - [`vi`]: amortized variational inference with a graph-convolution encoder.
//! - [`eval`]: reconstruction scoring and model comparison.

pub mod error;
pub mod eval;
pub mod generative;
pub mod geometry;
pub mod graph;
pub mod hmc;
pub mod priors;
pub mod vi;

pub use error::{Error, Result};
pub use generative::{Geometry, LatentConfiguration, ModelParams};
pub use geometry::PolarPoint;
pub use graph::Graph;
