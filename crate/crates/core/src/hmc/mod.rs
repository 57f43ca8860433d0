//! Full posterior inference for the hyperbolic model by Hamiltonian Monte Carlo.
//!
//! The sampler works on an unconstrained reparameterization (see
//! [`posterior`]) and stores draws on the constrained scale. Cost per gradient
//! is O(N²): every node pair enters the likelihood.

mod diagnostics;
mod draws;
pub mod init;
pub mod posterior;
pub mod sampler;

pub use diagnostics::{effective_sample_size, split_rhat, Diagnostics};
pub use draws::{posterior_distance_summary, posterior_probability_summary, Draw, PosteriorDraws};
pub use posterior::{log_posterior, Posterior, UnconstrainedState};
pub use sampler::{leapfrog, run_chain, ChainOutput, LogDensity, PhasePoint, SamplerSettings};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generative::{expected_density, sample_positions, Geometry, ModelParams};
use crate::graph::Graph;
use crate::priors::temperature_to_unconstrained;
use crate::vi::{fit_vi, VariationalConfig};

/// Fraction of divergent warmup iterations that flags a run as failed.
pub const MAX_WARMUP_DIVERGENCE_FRACTION: f64 = 0.25;

const DENSITY_MATCH_NODES: usize = 300;

/// Initial temperature of every chain.
pub const INITIAL_TEMPERATURE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HmcConfig {
    pub warmup: usize,
    pub draws: usize,
    /// Initial step size; adapted during warmup. `None` searches for one.
    pub step_size: Option<f64>,
    pub n_leapfrog: usize,
    pub seed: u64,
    pub init: HmcInit,
}

/// Where the chain starts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HmcInit {
    /// Positions from the prior at a density-matched radius, `α = R`, `T = 0.1`.
    Prior,
    /// Posterior means and globals of a default variational fit.
    Variational,
    /// Spectral layout at a density-matched radius, then gradient ascent to
    /// the nearby posterior mode. With an identity mass matrix the stable step
    /// is set by the stiff radial and angular directions, so chains barely
    /// move from wherever they start.
    #[default]
    Spectral,
}

impl Default for HmcConfig {
    fn default() -> Self {
        HmcConfig {
            warmup: 1000,
            draws: 1000,
            step_size: None,
            n_leapfrog: 32,
            seed: 0,
            init: HmcInit::default(),
        }
    }
}

/// Samples the learnable-temperature posterior.
pub fn hmc_sample(g: &Graph, config: &HmcConfig) -> Result<PosteriorDraws> {
    sample_with(Posterior::new(g), g, config)
}

/// Same sampler with `T` held at `temperature` and dropped from the state.
pub fn fixed_temperature_mode(g: &Graph, temperature: f64, config: &HmcConfig) -> Result<PosteriorDraws> {
    sample_with(Posterior::with_fixed_temperature(g, temperature)?, g, config)
}

fn sample_with(post: Posterior, g: &Graph, config: &HmcConfig) -> Result<PosteriorDraws> {
    if g.n() < 2 {
        return Err(Error::domain("HMC needs a graph with at least 2 nodes"));
    }
    if config.n_leapfrog == 0 {
        return Err(Error::Config("n_leapfrog must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init = match config.init {
        HmcInit::Prior => initial_state(&post, g, &mut rng)?,
        HmcInit::Variational => variational_state(&post, g, config.seed)?,
        HmcInit::Spectral => spectral_state(&post, g, &mut rng)?,
    };
    let settings = SamplerSettings {
        warmup: config.warmup,
        draws: config.draws,
        step_size: config.step_size,
        n_leapfrog: config.n_leapfrog,
        ..SamplerSettings::default()
    };
    let chain = run_chain(&post, init, &settings, &mut rng)?;

    let failure = (config.warmup > 0
        && chain.warmup_divergences as f64 > MAX_WARMUP_DIVERGENCE_FRACTION * config.warmup as f64)
        .then(|| {
            format!(
                "{} of {} warmup iterations diverged",
                chain.warmup_divergences, config.warmup
            )
        });
    let draws = chain
        .samples
        .iter()
        .map(|x| {
            let (params, positions) = post.constrain(x);
            Draw { params, positions }
        })
        .collect();
    Ok(PosteriorDraws {
        draws,
        acceptance_rate: chain.acceptance_rate,
        divergence_count: chain.divergences,
        warmup_divergences: chain.warmup_divergences,
        step_size: chain.step_size,
        fixed_temperature: post.fixed_temperature(),
        failure,
    })
}

/// Chooses the starting radius so that prior positions at `α = R`, `T = 0.1`
/// reproduce the observed edge density.
pub fn density_matched_radius<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<f64> {
    let target = g.density().clamp(1.0 / g.pair_count().max(1) as f64, 0.5);
    // the expected density does not depend on N, so large graphs are subsampled
    let n = g.n().clamp(2, DENSITY_MATCH_NODES);
    let seed: u64 = rng.random();
    let density_at = |radius: f64| -> Result<f64> {
        let params = ModelParams::new(radius, radius, INITIAL_TEMPERATURE)?;
        let mut local = ChaCha8Rng::seed_from_u64(seed);
        let mut total = 0.0;
        for _ in 0..4 {
            total += expected_density(&sample_positions(Geometry::Hyperbolic, n, params, &mut local)?);
        }
        Ok(total / 4.0)
    };
    // density decreases in R for α = R
    let (mut lo, mut hi) = (0.1f64, 40.0f64);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if density_at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn initial_state<R: Rng + ?Sized>(post: &Posterior, g: &Graph, rng: &mut R) -> Result<Vec<f64>> {
    let n = g.n();
    let radius = density_matched_radius(g, rng)?;
    let mut x = vec![radius.ln(), radius];
    if post.learns_temperature() {
        x.push(temperature_to_unconstrained(INITIAL_TEMPERATURE));
    }
    for _ in 0..n {
        let u: f64 = rng.random_range(1e-6..1.0 - 1e-6);
        x.push((u / (1.0 - u)).ln());
    }
    for _ in 0..n {
        x.push(rng.random_range(0.0..std::f64::consts::TAU));
    }
    Ok(x)
}

fn variational_state(post: &Posterior, g: &Graph, seed: u64) -> Result<Vec<f64>> {
    let cfg = VariationalConfig {
        seed,
        fixed_temperature: post.fixed_temperature(),
        ..VariationalConfig::default()
    };
    let fit = fit_vi(g, &cfg)?;
    let params = fit.state.params();
    let embedding = fit.state.mean_embedding(g)?;
    Ok(init::encode_state(post, params.scale, params.alpha, params.temperature, &embedding))
}

fn spectral_state<R: Rng + ?Sized>(post: &Posterior, g: &Graph, rng: &mut R) -> Result<Vec<f64>> {
    let mut x = if g.n() < 3 {
        initial_state(post, g, rng)?
    } else {
        let radius = density_matched_radius(g, rng)?;
        let points = init::spectral_embedding(g, radius)?;
        init::encode_state(post, radius, radius, INITIAL_TEMPERATURE, &points)
    };
    init::ascend_mode(post, &mut x, init::MODE_ASCENT_STEPS, init::MODE_ASCENT_RATE)?;
    Ok(x)
}
