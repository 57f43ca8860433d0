//! Chain starting points.
//!
//! The posterior is strongly multimodal in the angles: a configuration whose
//! angular order is tangled is a local mode that neither HMC nor gradient
//! ascent leaves. The spectral start orders nodes around the circle by a
//! spectral layout and sets radii by degree rank, which lands in the right
//! basin; an Adam ascent then moves it to the nearby mode.

use super::posterior::Posterior;
use super::sampler::LogDensity;
use crate::error::Result;
use crate::graph::{spectral_layout, Graph};
use crate::priors::temperature_to_unconstrained;

pub const MODE_ASCENT_STEPS: usize = 2000;
pub const MODE_ASCENT_RATE: f64 = 0.01;

/// Polar `(r, θ)` starting positions inside a disk of the given radius:
/// angles from [`spectral_layout`], radii from the uniform-disk quantile of
/// each node's degree rank, so hubs sit near the center.
pub fn spectral_embedding(g: &Graph, radius: f64) -> Result<Vec<[f64; 2]>> {
    let layout = spectral_layout(g)?;
    let n = g.n();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| std::cmp::Reverse(g.degree(i)));
    let mut r = vec![0.0; n];
    for (rank, &i) in by_degree.iter().enumerate() {
        // the radial CDF is about e^(r − R)
        r[i] = (radius + ((rank as f64 + 0.5) / n as f64).ln()).max(0.05 * radius);
    }
    Ok(layout.iter().zip(r).map(|(p, r)| [r, p[1].atan2(p[0])]).collect())
}

/// Unconstrained state for the given globals and polar positions.
pub fn encode_state(post: &Posterior, radius: f64, alpha: f64, temperature: f64, points: &[[f64; 2]]) -> Vec<f64> {
    let mut x = vec![radius.ln(), alpha];
    if post.learns_temperature() {
        x.push(temperature_to_unconstrained(temperature));
    }
    let span = radius.cosh() - 1.0;
    x.extend(points.iter().map(|p| {
        let u = ((p[0].cosh() - 1.0) / span).clamp(1e-9, 1.0 - 1e-9);
        (u / (1.0 - u)).ln()
    }));
    x.extend(points.iter().map(|p| p[1]));
    x
}

/// Adam ascent of the log density from `x`. Stops early on a non-finite
/// gradient and returns the final log density.
pub fn ascend_mode<T: LogDensity + ?Sized>(target: &T, x: &mut [f64], steps: usize, rate: f64) -> Result<f64> {
    let (b1, b2) = (0.9f64, 0.999f64);
    let mut m = vec![0.0; x.len()];
    let mut v = vec![0.0; x.len()];
    let mut grad = vec![0.0; x.len()];
    for step in 1..=steps {
        target.log_density_and_grad(x, &mut grad)?;
        if grad.iter().any(|g| !g.is_finite()) {
            break;
        }
        let c1 = 1.0 - b1.powi(step as i32);
        let c2 = 1.0 - b2.powi(step as i32);
        for ((xk, g), (mk, vk)) in x.iter_mut().zip(&grad).zip(m.iter_mut().zip(v.iter_mut())) {
            *mk = b1 * *mk + (1.0 - b1) * g;
            *vk = b2 * *vk + (1.0 - b2) * g * g;
            *xk += rate * (*mk / c1) / ((*vk / c2).sqrt() + 1e-8);
        }
    }
    target.log_density_and_grad(x, &mut grad)
}
