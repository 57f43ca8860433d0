//! Reparameterized Monte Carlo ELBO and its exact gradient.
//!
//! Each node carries two independent Gaussians, `z_r ~ N(μ_r, σ_r²)` and
//! `z_θ ~ N(μ_θ, σ_θ²)`, with a standard-normal prior on both. The hyperbolic
//! model maps them to the disk through `u = logistic(z_r)`,
//! `r = arccosh(1 + (cosh R − 1)u)`, `θ = z_θ`; the Euclidean model places the
//! node at `τ·(z_r, z_θ)`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::gcn::{gcn_backward, gcn_encode, EncoderWeights, NodeGaussians, NodeGradients, NormalizedAdjacency};
use crate::error::{Error, Result};
use crate::generative::{bernoulli_logit, logistic};
use crate::geometry::{pair_distance_grad, radius_from_logit, NodeTrig, PolarPoint};
use crate::graph::Graph;
use crate::priors::{alpha_prior, log_radius_prior, log_spread_prior, temperature_from_unconstrained, temperature_prior};

/// Standard deviation of the Euclidean model's `α` prior, centered at zero.
pub const EUCLIDEAN_ALPHA_PRIOR_SD: f64 = 10.0;
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatentModel {
    Hyperbolic,
    Euclidean,
}

/// Global parameters on the unconstrained scale: `log R` (or `log τ`), `α`
/// and `η` with `T = 0.5·logistic(η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Globals {
    pub log_scale: f64,
    pub alpha: f64,
    pub logit_temperature: f64,
}

impl Globals {
    pub const LEN: usize = 3;

    pub fn to_array(self) -> [f64; 3] {
        [self.log_scale, self.alpha, self.logit_temperature]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Globals {
            log_scale: v[0],
            alpha: v[1],
            logit_temperature: v[2],
        }
    }
}

/// Decoded global parameters. `scale` is the disk radius `R` for the
/// hyperbolic model and the spread `τ` for the Euclidean one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlobalParams {
    pub scale: f64,
    pub alpha: f64,
    pub temperature: f64,
}

/// Maps a Gaussian auxiliary pair to the disk of radius `radius`.
///
/// `r` lies strictly inside `(0, R)` whenever the representable values allow
/// it; `θ` is reduced to `[0, 2π)`.
pub fn decode_to_disk(z_r: f64, z_theta: f64, radius: f64) -> Result<PolarPoint> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::domain(format!("disk radius must be positive, got {radius}")));
    }
    if !(z_r.is_finite() && z_theta.is_finite()) {
        return Err(Error::domain("latent auxiliaries must be finite"));
    }
    let below = radius * (1.0 - f64::EPSILON);
    let r = radius_from_logit(z_r, radius).r.clamp(f64::MIN_POSITIVE, below);
    PolarPoint::new(r, z_theta)
}

/// Standard-normal draws shared by all nodes for one ELBO evaluation;
/// `eps_r[k][i]` belongs to Monte Carlo sample `k` and node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElboNoise {
    pub eps_r: Vec<Vec<f64>>,
    pub eps_theta: Vec<Vec<f64>>,
}

impl ElboNoise {
    pub fn sample<R: Rng + ?Sized>(n: usize, n_mc: usize, rng: &mut R) -> Self {
        let mut draw = || -> Vec<f64> { (0..n).map(|_| rng.sample(StandardNormal)).collect() };
        let mut eps_r = Vec::with_capacity(n_mc);
        let mut eps_theta = Vec::with_capacity(n_mc);
        for _ in 0..n_mc {
            eps_r.push(draw());
            eps_theta.push(draw());
        }
        ElboNoise { eps_r, eps_theta }
    }

    pub fn n_mc(&self) -> usize {
        self.eps_r.len()
    }

    /// Relabels so that old node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let apply = |rows: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            rows.iter()
                .map(|row| {
                    let mut out = vec![0.0; row.len()];
                    for (i, &p) in perm.iter().enumerate() {
                        out[p] = row[i];
                    }
                    out
                })
                .collect()
        };
        ElboNoise {
            eps_r: apply(&self.eps_r),
            eps_theta: apply(&self.eps_theta),
        }
    }
}

/// ELBO value split into its three terms: `likelihood − kl + prior`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElboTerms {
    pub value: f64,
    pub likelihood: f64,
    pub kl: f64,
    pub prior: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElboGradient {
    pub encoder: EncoderWeights,
    pub globals: [f64; 3],
}

/// Observed graph with its normalized adjacency, built once per fit.
#[derive(Debug, Clone)]
pub struct ElboProblem {
    pub model: LatentModel,
    pub adjacency: NormalizedAdjacency,
    observed: Vec<bool>,
    n: usize,
    /// Held temperature; `None` learns it.
    pub fixed_temperature: Option<f64>,
}

impl ElboProblem {
    pub fn new(g: &Graph, model: LatentModel, fixed_temperature: Option<f64>) -> Result<Self> {
        if let Some(t) = fixed_temperature {
            if !(t > 0.0 && t <= crate::generative::MAX_TEMPERATURE) {
                return Err(Error::domain(format!("fixed temperature must lie in (0, 0.5], got {t}")));
            }
        }
        Ok(ElboProblem {
            model,
            adjacency: NormalizedAdjacency::new(g),
            observed: g.upper_triangle_indicator(),
            n: g.n(),
            fixed_temperature,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn decode_globals(&self, g: &Globals) -> GlobalParams {
        GlobalParams {
            scale: g.log_scale.exp(),
            alpha: g.alpha,
            temperature: self
                .fixed_temperature
                .unwrap_or_else(|| temperature_from_unconstrained(g.logit_temperature)),
        }
    }

    /// Log prior of the globals (with Jacobians) and its gradient.
    fn log_prior(&self, g: &Globals) -> (f64, [f64; 3]) {
        let mut grad = [0.0; 3];
        let mut value;
        match self.model {
            LatentModel::Hyperbolic => {
                let radius = g.log_scale.exp();
                let (v, d) = log_radius_prior(g.log_scale);
                let (va, da, dr) = alpha_prior(g.alpha, radius);
                value = v + va;
                grad[0] = d + dr * radius;
                grad[1] = da;
            }
            LatentModel::Euclidean => {
                let (v, d) = log_spread_prior(g.log_scale);
                let z = g.alpha / EUCLIDEAN_ALPHA_PRIOR_SD;
                value = v - 0.5 * z * z - EUCLIDEAN_ALPHA_PRIOR_SD.ln() - LN_SQRT_2PI;
                grad[0] = d;
                grad[1] = -z / EUCLIDEAN_ALPHA_PRIOR_SD;
            }
        }
        if self.fixed_temperature.is_none() {
            let (v, d) = temperature_prior(g.logit_temperature);
            value += v;
            grad[2] = d;
        }
        (value, grad)
    }

    /// Log likelihood of one latent draw and its gradient with respect to the
    /// auxiliaries and the decoded globals `(scale, α, T)`.
    fn likelihood(&self, gp: &GlobalParams, z_r: &[f64], z_t: &[f64]) -> (f64, Vec<f64>, Vec<f64>, [f64; 3]) {
        let n = self.n;
        let inv_two_t = 0.5 / gp.temperature;
        let mut dz_r = vec![0.0; n];
        let mut dz_t = vec![0.0; n];
        let (mut ll, mut d_scale, mut d_alpha, mut d_temp) = (0.0, 0.0, 0.0, 0.0);
        // returns dℓ-weighted derivative of the log likelihood wrt the distance
        let mut pair = |y: bool, d: f64| -> f64 {
            let logit = (gp.alpha - d) * inv_two_t;
            let (l, g) = bernoulli_logit(y, logit);
            ll += l;
            d_alpha += g * inv_two_t;
            d_temp -= g * logit / gp.temperature;
            -g * inv_two_t
        };
        let mut k = 0;
        match self.model {
            LatentModel::Hyperbolic => {
                let maps: Vec<_> = z_r.iter().map(|&z| radius_from_logit(z, gp.scale)).collect();
                let trig: Vec<NodeTrig> = maps.iter().zip(z_t).map(|(m, &t)| NodeTrig::new(m.r, t)).collect();
                let mut dr = vec![0.0; n];
                for i in 0..n {
                    for j in (i + 1)..n {
                        let pd = pair_distance_grad(&trig[i], &trig[j]);
                        let w = pair(self.observed[k], pd.distance);
                        k += 1;
                        dr[i] += w * pd.d_ra;
                        dr[j] += w * pd.d_rb;
                        dz_t[i] += w * pd.d_ta;
                        dz_t[j] -= w * pd.d_ta;
                    }
                }
                for i in 0..n {
                    dz_r[i] = dr[i] * maps[i].dr_domega;
                    d_scale += dr[i] * maps[i].dr_dradius;
                }
            }
            LatentModel::Euclidean => {
                let tau = gp.scale;
                for i in 0..n {
                    for j in (i + 1)..n {
                        let (dx, dy) = (z_r[i] - z_r[j], z_t[i] - z_t[j]);
                        let delta = (dx * dx + dy * dy).sqrt();
                        let w = pair(self.observed[k], tau * delta);
                        k += 1;
                        d_scale += w * delta;
                        if delta > 0.0 {
                            let c = w * tau / delta;
                            dz_r[i] += c * dx;
                            dz_r[j] -= c * dx;
                            dz_t[i] += c * dy;
                            dz_t[j] -= c * dy;
                        }
                    }
                }
            }
        }
        (ll, dz_r, dz_t, [d_scale, d_alpha, d_temp])
    }

    /// ELBO under the given noise, with gradients for the encoder weights and
    /// the unconstrained globals.
    pub fn evaluate(&self, w: &EncoderWeights, globals: &Globals, noise: &ElboNoise) -> Result<(ElboTerms, ElboGradient)> {
        let n_mc = noise.n_mc();
        if n_mc == 0 {
            return Err(Error::Config("n_mc must be at least 1".into()));
        }
        let enc = gcn_encode(&self.adjacency, w)?;
        let q = &enc.gaussians;
        let gp = self.decode_globals(globals);
        let n = self.n;

        let mut node_grad = NodeGradients::zeros(n);
        let mut likelihood = 0.0;
        let mut d_globals = [0.0; 3];
        let scale = 1.0 / n_mc as f64;
        let mut z_r = vec![0.0; n];
        let mut z_t = vec![0.0; n];
        for s in 0..n_mc {
            let (er, et) = (&noise.eps_r[s], &noise.eps_theta[s]);
            for i in 0..n {
                z_r[i] = q.mu_r[i] + q.sigma_r[i] * er[i];
                z_t[i] = q.mu_theta[i] + q.sigma_theta[i] * et[i];
            }
            let (ll, dzr, dzt, dg) = self.likelihood(&gp, &z_r, &z_t);
            likelihood += scale * ll;
            for i in 0..n {
                node_grad.mu_r[i] += scale * dzr[i];
                node_grad.sigma_r[i] += scale * dzr[i] * er[i];
                node_grad.mu_theta[i] += scale * dzt[i];
                node_grad.sigma_theta[i] += scale * dzt[i] * et[i];
            }
            for (a, b) in d_globals.iter_mut().zip(dg) {
                *a += scale * b;
            }
        }

        let kl = kl_divergence(q);
        for i in 0..n {
            node_grad.mu_r[i] -= q.mu_r[i];
            node_grad.mu_theta[i] -= q.mu_theta[i];
            node_grad.sigma_r[i] -= q.sigma_r[i] - 1.0 / q.sigma_r[i];
            node_grad.sigma_theta[i] -= q.sigma_theta[i] - 1.0 / q.sigma_theta[i];
        }

        let (prior, prior_grad) = self.log_prior(globals);
        let value = likelihood - kl + prior;
        for (term, v) in [("likelihood", likelihood), ("KL", kl), ("prior", prior)] {
            if !v.is_finite() {
                return Err(Error::numerical(term, format!("ELBO term evaluated to {v}")));
            }
        }

        // chain rule from decoded (scale, α, T) to (log scale, α, η)
        let mut g_globals = prior_grad;
        g_globals[0] += d_globals[0] * gp.scale;
        g_globals[1] += d_globals[1];
        if self.fixed_temperature.is_none() {
            let s = logistic(globals.logit_temperature);
            g_globals[2] += d_globals[2] * gp.temperature * (1.0 - s);
        }

        let encoder = gcn_backward(&self.adjacency, w, &enc, &node_grad);
        Ok((
            ElboTerms {
                value,
                likelihood,
                kl,
                prior,
            },
            ElboGradient {
                encoder,
                globals: g_globals,
            },
        ))
    }

    /// Posterior-mean latent coordinates: `(r, θ)` for the hyperbolic model,
    /// `(x, y)` for the Euclidean one.
    pub fn mean_embedding(&self, w: &EncoderWeights, globals: &Globals) -> Result<Vec<[f64; 2]>> {
        let q = gcn_encode(&self.adjacency, w)?.gaussians;
        let gp = self.decode_globals(globals);
        (0..self.n)
            .map(|i| match self.model {
                LatentModel::Hyperbolic => {
                    let p = decode_to_disk(q.mu_r[i], q.mu_theta[i], gp.scale)?;
                    Ok([p.r(), p.theta()])
                }
                LatentModel::Euclidean => Ok([gp.scale * q.mu_r[i], gp.scale * q.mu_theta[i]]),
            })
            .collect()
    }
}

/// `Σᵢ ½(σ² + μ² − 1 − log σ²)` over both coordinates.
pub fn kl_divergence(q: &NodeGaussians) -> f64 {
    let term = |mu: f64, sigma: f64| 0.5 * (sigma * sigma + mu * mu - 1.0) - sigma.ln();
    (0..q.n())
        .map(|i| term(q.mu_r[i], q.sigma_r[i]) + term(q.mu_theta[i], q.sigma_theta[i]))
        .sum()
}

/// One-shot ELBO with freshly drawn noise.
pub fn elbo<R: Rng + ?Sized>(
    g: &Graph,
    model: LatentModel,
    w: &EncoderWeights,
    globals: &Globals,
    n_mc: usize,
    rng: &mut R,
) -> Result<(ElboTerms, ElboGradient)> {
    let problem = ElboProblem::new(g, model, None)?;
    problem.evaluate(w, globals, &ElboNoise::sample(g.n(), n_mc, rng))
}

#[cfg(test)]
mod tests {
    use super::{decode_to_disk, kl_divergence, ElboNoise, ElboProblem, Globals, LatentModel};
    use crate::error::Error;
    use crate::geometry::{hyperbolic_distance_stable, PolarPoint};
    use crate::graph::Graph;
    use crate::vi::gcn::{EncoderWeights, NodeGaussians};
    use rand_distr::StandardNormal;
    use proptest::prelude::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn toy() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (2, 3), (4, 5)]).unwrap()
    }

    #[test]
    fn decode_examples() {
        let p = decode_to_disk(0.0, 1.0, 4.0).unwrap();
        assert!((p.r() - (1.0 + (4f64.cosh() - 1.0) / 2.0).acosh()).abs() < 1e-12);
        let p = decode_to_disk(60.0, 0.0, 4.0).unwrap();
        assert!(p.r() < 4.0 && (p.r() - 4.0).abs() < 1e-12);
        let p = decode_to_disk(-800.0, 0.0, 4.0).unwrap();
        assert!(p.r() > 0.0);
        let p = decode_to_disk(0.0, TAU + 0.3, 4.0).unwrap();
        assert!((p.theta() - 0.3).abs() < 1e-12);
        assert!(decode_to_disk(f64::NAN, 0.0, 4.0).is_err());
    }

    proptest! {
        #[test]
        fn decode_stays_inside(z in -30.0f64..30.0, t in -50.0f64..50.0, radius in 0.05f64..30.0) {
            let p = decode_to_disk(z, t, radius).unwrap();
            prop_assert!(p.r() > 0.0 && p.r() < radius);
            prop_assert!((0.0..TAU).contains(&p.theta()));
        }

        #[test]
        fn kl_is_nonnegative(
            mu in proptest::collection::vec(-5.0f64..5.0, 6),
            ls in proptest::collection::vec(-3.0f64..2.0, 6),
        ) {
            let q = NodeGaussians {
                mu_r: mu[..3].to_vec(),
                sigma_r: ls[..3].iter().map(|v| v.exp()).collect(),
                mu_theta: mu[3..].to_vec(),
                sigma_theta: ls[3..].iter().map(|v| v.exp()).collect(),
            };
            prop_assert!(kl_divergence(&q) >= 0.0);
        }
    }

    #[test]
    fn kl_zero_exactly_at_standard_normal() {
        let q = NodeGaussians {
            mu_r: vec![0.0; 4],
            sigma_r: vec![1.0; 4],
            mu_theta: vec![0.0; 4],
            sigma_theta: vec![1.0; 4],
        };
        assert_eq!(kl_divergence(&q), 0.0);
        let mut q2 = q.clone();
        q2.sigma_theta[2] = 1.01;
        assert!(kl_divergence(&q2) > 0.0);
    }

    fn check_gradients(model: LatentModel, fixed: Option<f64>) {
        let g = toy();
        let problem = ElboProblem::new(&g, model, fixed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let w = EncoderWeights::glorot(6, 5, &mut rng);
        let globals = Globals {
            log_scale: 1.2f64.ln() + if model == LatentModel::Hyperbolic { 0.8 } else { 0.0 },
            alpha: 2.0,
            logit_temperature: -0.3,
        };
        let noise = ElboNoise::sample(6, 3, &mut rng);
        let (_, grad) = problem.evaluate(&w, &globals, &noise).unwrap();
        let h = 1e-4;
        let value = |w: &EncoderWeights, gl: &Globals| problem.evaluate(w, gl, &noise).unwrap().0.value;
        let close = |fd: f64, an: f64, what: &str| {
            assert!((fd - an).abs() <= 1e-3 * fd.abs().max(an.abs()).max(1e-2), "{what}: fd={fd} an={an}");
        };
        for k in 0..w.w1.len() + w.w2.len() {
            let bump = |delta: f64| {
                let mut v = w.clone();
                if k < v.w1.len() {
                    v.w1[k] += delta;
                } else {
                    v.w2[k - w.w1.len()] += delta;
                }
                value(&v, &globals)
            };
            let an = if k < w.w1.len() { grad.encoder.w1[k] } else { grad.encoder.w2[k - w.w1.len()] };
            close((bump(h) - bump(-h)) / (2.0 * h), an, &format!("weight {k}"));
        }
        for k in 0..3 {
            let bump = |delta: f64| {
                let mut a = globals.to_array();
                a[k] += delta;
                value(&w, &Globals::from_slice(&a))
            };
            close((bump(h) - bump(-h)) / (2.0 * h), grad.globals[k], &format!("global {k}"));
        }
        if fixed.is_some() {
            assert_eq!(grad.globals[2], 0.0);
        }
    }

    #[test]
    fn hyperbolic_gradients_match_finite_differences() {
        check_gradients(LatentModel::Hyperbolic, None);
        check_gradients(LatentModel::Hyperbolic, Some(0.2));
    }

    #[test]
    fn euclidean_gradients_match_finite_differences() {
        check_gradients(LatentModel::Euclidean, None);
    }

    #[test]
    fn elbo_is_permutation_invariant() {
        let g = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = EncoderWeights::glorot(6, 8, &mut rng);
        let globals = Globals {
            log_scale: 1.5,
            alpha: 4.0,
            logit_temperature: -1.0,
        };
        let noise = ElboNoise::sample(6, 2, &mut rng);
        let perm = [3, 5, 0, 1, 4, 2];
        for model in [LatentModel::Hyperbolic, LatentModel::Euclidean] {
            let a = ElboProblem::new(&g, model, None).unwrap().evaluate(&w, &globals, &noise).unwrap().0;
            let pg = g.permute(&perm).unwrap();
            let b = ElboProblem::new(&pg, model, None)
                .unwrap()
                .evaluate(&w.permute_inputs(&perm), &globals, &noise.permuted(&perm))
                .unwrap()
                .0;
            assert!((a.value - b.value).abs() < 1e-8, "{a:?} {b:?}");
        }
    }

    #[test]
    fn likelihood_matches_naive_monte_carlo() {
        // three nodes, one edge; fixed encoder output via zero weights so
        // every auxiliary is standard normal
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let problem = ElboProblem::new(&g, LatentModel::Hyperbolic, None).unwrap();
        let w = EncoderWeights::zeros(3, 4);
        let globals = Globals {
            log_scale: 3f64.ln(),
            alpha: 3.0,
            logit_temperature: crate::priors::temperature_to_unconstrained(0.25),
        };
        let n_mc = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let noise = ElboNoise::sample(3, n_mc, &mut rng);
        let terms = problem.evaluate(&w, &globals, &noise).unwrap().0;

        // independent sampler: fresh stream, textbook formulas
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let (radius, alpha, t) = (3.0f64, 3.0, 0.25);
        let mut samples = Vec::with_capacity(n_mc);
        for _ in 0..n_mc {
            let pts: Vec<PolarPoint> = (0..3)
                .map(|_| {
                    let zr: f64 = rng.sample(StandardNormal);
                    let zt: f64 = rng.sample(StandardNormal);
                    let u = 1.0 / (1.0 + (-zr).exp());
                    let r = (1.0 + (radius.cosh() - 1.0) * u).acosh();
                    PolarPoint::new(r, zt).unwrap()
                })
                .collect();
            let mut ll = 0.0;
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let d = hyperbolic_distance_stable(pts[i], pts[j]);
                let p = 1.0 / (1.0 + ((d - alpha) / (2.0 * t)).exp());
                ll += if g.has_edge(i, j) { p.ln() } else { (1.0 - p).ln() };
            }
            samples.push(ll);
        }
        let mean = samples.iter().sum::<f64>() / n_mc as f64;
        let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n_mc - 1) as f64;
        let se = (2.0 * var / n_mc as f64).sqrt();
        assert!((terms.likelihood - mean).abs() < 3.0 * se, "{} vs {mean} (se {se})", terms.likelihood);
    }

    #[test]
    fn nonfinite_terms_are_reported() {
        let g = toy();
        let problem = ElboProblem::new(&g, LatentModel::Hyperbolic, None).unwrap();
        let w = EncoderWeights::zeros(6, 3);
        let globals = Globals {
            log_scale: 1.0,
            alpha: f64::INFINITY,
            logit_temperature: 0.0,
        };
        let noise = ElboNoise::sample(6, 1, &mut ChaCha8Rng::seed_from_u64(0));
        let err = problem.evaluate(&w, &globals, &noise).unwrap_err();
        assert!(matches!(err, Error::Numerical { .. }), "{err:?}");
    }
}
