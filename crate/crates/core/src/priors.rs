//! Priors on the global parameters and the unconstrained transforms shared by
//! the HMC and variational engines.
//!
//! - `R ~ Exponential(1)`, sampled as `log R`.
//! - `α ~ Normal(R, 0.1)` (standard deviation 0.1).
//! - `T ~ Gamma(0.1, 1)` truncated to `(0, 0.5)`, sampled as `η` with
//!   `T = 0.5·logistic(η)`; the truncation constant is dropped.
//! - `τ ~ Gamma(1, 1)` for the Euclidean spread, sampled as `log τ`.
//!
//! All log densities include the log-Jacobian of their transform.

use crate::generative::{logistic, MAX_TEMPERATURE};

pub const ALPHA_PRIOR_SD: f64 = 0.1;
pub const TEMPERATURE_SHAPE: f64 = 0.1;
pub const TEMPERATURE_RATE: f64 = 1.0;
/// `ln Γ(0.1)`.
const LN_GAMMA_TEMPERATURE_SHAPE: f64 = 2.252_712_651_734_206;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln logistic(x)`.
#[inline]
pub fn log_logistic(x: f64) -> f64 {
    -crate::generative::softplus(-x)
}

#[inline]
pub fn temperature_from_unconstrained(eta: f64) -> f64 {
    MAX_TEMPERATURE * logistic(eta)
}

pub fn temperature_to_unconstrained(t: f64) -> f64 {
    let s = (t / MAX_TEMPERATURE).clamp(1e-300, 1.0 - 1e-16);
    (s / (1.0 - s)).ln()
}

/// Log density (with Jacobian) of `log R` and its derivative.
pub fn log_radius_prior(log_r: f64) -> (f64, f64) {
    let r = log_r.exp();
    (-r + log_r, 1.0 - r)
}

/// `ln N(α; R, 0.1)` and its partials in `α` and `R`.
pub fn alpha_prior(alpha: f64, radius: f64) -> (f64, f64, f64) {
    let z = (alpha - radius) / ALPHA_PRIOR_SD;
    let value = -0.5 * z * z - ALPHA_PRIOR_SD.ln() - LN_SQRT_2PI;
    let d_alpha = -z / ALPHA_PRIOR_SD;
    (value, d_alpha, -d_alpha)
}

/// Log density (with Jacobian) of `η` and its derivative.
pub fn temperature_prior(eta: f64) -> (f64, f64) {
    let t = temperature_from_unconstrained(eta);
    let s = logistic(eta);
    let log_gamma = (TEMPERATURE_SHAPE - 1.0) * t.ln() - TEMPERATURE_RATE * t
        + TEMPERATURE_SHAPE * TEMPERATURE_RATE.ln()
        - LN_GAMMA_TEMPERATURE_SHAPE;
    let log_jac = MAX_TEMPERATURE.ln() + log_logistic(eta) + log_logistic(-eta);
    // dT/dη = T(1 − s)
    let grad = ((TEMPERATURE_SHAPE - 1.0) - TEMPERATURE_RATE * t) * (1.0 - s) + 1.0 - 2.0 * s;
    (log_gamma + log_jac, grad)
}

/// Log density (with Jacobian) of `log τ` under `τ ~ Gamma(1, 1)`.
pub fn log_spread_prior(log_tau: f64) -> (f64, f64) {
    let tau = log_tau.exp();
    (-tau + log_tau, 1.0 - tau)
}

/// Log density of the logit of a `Uniform(0, 1)` variable, and its derivative.
pub fn logit_uniform_prior(omega: f64) -> (f64, f64) {
    (log_logistic(omega) + log_logistic(-omega), 1.0 - 2.0 * logistic(omega))
}
