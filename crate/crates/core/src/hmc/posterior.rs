//! Log posterior of the hyperbolic model on an unconstrained parameter vector.
//!
//! Flat layout: `[log R, α, η_T?, ω_0..ω_{N−1}, θ_0..θ_{N−1}]` where
//! `T = 0.5·logistic(η_T)` (absent when the temperature is fixed),
//! `u_i = logistic(ω_i)` is the disk quantile of node `i`, so that
//! `r_i = arccosh(1 + (cosh R − 1)·u_i)`, and `θ_i` is an unwrapped angle.
//!
//! Under the uniform-disk prior `u_i ~ Uniform(0, 1)` independently of `R`, so
//! the position prior reduces to the logit Jacobian of each `ω_i`.

use crate::error::{Error, Result};
use crate::generative::{bernoulli_logit, link_logit, logistic, ModelParams};
use crate::geometry::{pair_distance_grad, radius_from_logit, NodeTrig, PolarPoint};
use crate::graph::Graph;
use crate::priors::{
    alpha_prior, log_radius_prior, logit_uniform_prior, temperature_from_unconstrained,
    temperature_prior,
};

/// Structured view of the unconstrained parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct UnconstrainedState {
    pub log_radius: f64,
    pub alpha: f64,
    /// `None` when the temperature is held fixed.
    pub logit_temperature: Option<f64>,
    pub logit_u: Vec<f64>,
    pub theta: Vec<f64>,
}

impl UnconstrainedState {
    pub fn n(&self) -> usize {
        self.theta.len()
    }

    pub fn dim(&self) -> usize {
        Layout::new(self.n(), self.logit_temperature.is_some()).dim()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.log_radius, self.alpha];
        v.extend(self.logit_temperature);
        v.extend_from_slice(&self.logit_u);
        v.extend_from_slice(&self.theta);
        v
    }

    pub fn from_vec(v: &[f64], n: usize, learn_temperature: bool) -> Result<Self> {
        let layout = Layout::new(n, learn_temperature);
        if v.len() != layout.dim() {
            return Err(Error::Config(format!(
                "state vector has {} entries, expected {}",
                v.len(),
                layout.dim()
            )));
        }
        Ok(UnconstrainedState {
            log_radius: v[0],
            alpha: v[1],
            logit_temperature: learn_temperature.then(|| v[2]),
            logit_u: v[layout.u_offset..layout.u_offset + n].to_vec(),
            theta: v[layout.theta_offset..].to_vec(),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub n: usize,
    pub learn_temperature: bool,
    pub u_offset: usize,
    pub theta_offset: usize,
}

impl Layout {
    pub fn new(n: usize, learn_temperature: bool) -> Self {
        let u_offset = if learn_temperature { 3 } else { 2 };
        Layout {
            n,
            learn_temperature,
            u_offset,
            theta_offset: u_offset + n,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta_offset + self.n
    }
}

/// Posterior target for one observed graph.
#[derive(Debug, Clone)]
pub struct Posterior {
    n: usize,
    observed: Vec<bool>,
    layout: Layout,
    fixed_temperature: Option<f64>,
}

impl Posterior {
    /// Learnable temperature.
    pub fn new(g: &Graph) -> Self {
        Self::build(g, None)
    }

    pub fn with_fixed_temperature(g: &Graph, temperature: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature <= crate::generative::MAX_TEMPERATURE) {
            return Err(Error::domain(format!("fixed temperature must lie in (0, 0.5], got {temperature}")));
        }
        Ok(Self::build(g, Some(temperature)))
    }

    fn build(g: &Graph, fixed_temperature: Option<f64>) -> Self {
        let n = g.n();
        Posterior {
            n,
            observed: g.upper_triangle_indicator(),
            layout: Layout::new(n, fixed_temperature.is_none()),
            fixed_temperature,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    pub fn learns_temperature(&self) -> bool {
        self.layout.learn_temperature
    }

    pub fn fixed_temperature(&self) -> Option<f64> {
        self.fixed_temperature
    }

    fn temperature(&self, x: &[f64]) -> f64 {
        match self.fixed_temperature {
            Some(t) => t,
            None => temperature_from_unconstrained(x[2]),
        }
    }

    /// Maps a flat state to model parameters and positions.
    pub fn constrain(&self, x: &[f64]) -> (ModelParams, Vec<PolarPoint>) {
        let radius = x[0].exp();
        let params = ModelParams {
            radius,
            alpha: x[1],
            temperature: self.temperature(x),
        };
        let l = self.layout;
        let positions = (0..self.n)
            .map(|i| {
                let r = radius_from_logit(x[l.u_offset + i], radius).r;
                PolarPoint::new(r, x[l.theta_offset + i]).expect("finite state maps to a valid point")
            })
            .collect();
        (params, positions)
    }

    /// Log density value only.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        let mut scratch = vec![0.0; self.dim()];
        self.log_density_and_grad(x, &mut scratch)
    }

    /// Log posterior (up to a constant) and its gradient, written into `grad`.
    pub fn log_density_and_grad(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        let l = self.layout;
        let n = self.n;
        debug_assert_eq!(x.len(), l.dim());
        debug_assert_eq!(grad.len(), l.dim());
        if let Some(k) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::numerical("state", format!("non-finite coordinate {k}")));
        }
        grad.fill(0.0);

        let log_radius = x[0];
        let radius = log_radius.exp();
        let alpha = x[1];
        let temperature = self.temperature(x);

        let mut value = 0.0;
        let mut nodes = Vec::with_capacity(n);
        let mut radial = Vec::with_capacity(n);
        for i in 0..n {
            let omega = x[l.u_offset + i];
            let map = radius_from_logit(omega, radius);
            nodes.push(NodeTrig::new(map.r, x[l.theta_offset + i]));
            radial.push(map);
            let (lp, dlp) = logit_uniform_prior(omega);
            value += lp;
            grad[l.u_offset + i] += dlp;
        }

        // likelihood in log-odds form
        let inv_two_t = 0.5 / temperature;
        let mut g_r = vec![0.0; n];
        let mut g_alpha = 0.0;
        let mut g_temperature = 0.0;
        let mut loglik = 0.0;
        let mut k = 0;
        for i in 0..n {
            let ni = nodes[i];
            for j in (i + 1)..n {
                let pd = pair_distance_grad(&ni, &nodes[j]);
                let eta = link_logit(pd.distance, alpha, temperature);
                let y = self.observed[k];
                k += 1;
                let (ll, resid) = bernoulli_logit(y, eta);
                loglik += ll;
                let g_d = -resid * inv_two_t;
                g_r[i] += g_d * pd.d_ra;
                g_r[j] += g_d * pd.d_rb;
                grad[l.theta_offset + i] += g_d * pd.d_ta;
                grad[l.theta_offset + j] -= g_d * pd.d_ta;
                g_alpha += resid;
                g_temperature -= resid * eta;
            }
        }
        if !loglik.is_finite() {
            return Err(Error::numerical("likelihood", "non-finite log-likelihood"));
        }
        value += loglik;
        g_alpha *= inv_two_t;
        g_temperature /= temperature;

        let mut g_log_radius = 0.0;
        for i in 0..n {
            grad[l.u_offset + i] += g_r[i] * radial[i].dr_domega;
            g_log_radius += g_r[i] * radial[i].dr_dradius;
        }
        g_log_radius *= radius;

        let (lp_r, dlp_r) = log_radius_prior(log_radius);
        let (lp_a, da, dr) = alpha_prior(alpha, radius);
        value += lp_r + lp_a;
        grad[0] = g_log_radius + dlp_r + dr * radius;
        grad[1] = g_alpha + da;

        if self.layout.learn_temperature {
            let eta_t = x[2];
            let (lp_t, dlp_t) = temperature_prior(eta_t);
            value += lp_t;
            let dt_deta = temperature * logistic(-eta_t);
            grad[2] = g_temperature * dt_deta + dlp_t;
        }

        if !value.is_finite() {
            return Err(Error::numerical("prior", "non-finite log prior"));
        }
        if let Some(k) = grad.iter().position(|v| !v.is_finite()) {
            return Err(Error::numerical("gradient", format!("non-finite gradient at coordinate {k}")));
        }
        Ok(value)
    }
}

/// Log posterior and gradient for a structured state.
pub fn log_posterior(state: &UnconstrainedState, g: &Graph, fixed_temperature: Option<f64>) -> Result<(f64, UnconstrainedState)> {
    if state.n() != g.n() || state.logit_u.len() != g.n() {
        return Err(Error::Config("state and graph sizes differ".into()));
    }
    if state.logit_temperature.is_some() == fixed_temperature.is_some() {
        return Err(Error::Config(
            "state must carry a temperature coordinate iff the temperature is learnable".into(),
        ));
    }
    let post = match fixed_temperature {
        Some(t) => Posterior::with_fixed_temperature(g, t)?,
        None => Posterior::new(g),
    };
    let x = state.to_vec();
    let mut grad = vec![0.0; x.len()];
    let value = post.log_density_and_grad(&x, &mut grad)?;
    Ok((value, UnconstrainedState::from_vec(&grad, g.n(), fixed_temperature.is_none())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::priors::temperature_to_unconstrained;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, learn_t: bool, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut x = vec![rng.random_range(0.5..2.0), rng.random_range(1.0..5.0)];
        if learn_t {
            x.push(rng.random_range(-3.0..1.0));
        }
        x.extend((0..n).map(|_| rng.random_range(-2.0..3.0)));
        x.extend((0..n).map(|_| rng.random_range(-4.0..10.0)));
        x
    }

    #[test]
    fn layout_lengths() {
        let g = Graph::from_edges(5, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(Posterior::new(&g).dim(), 13);
        assert_eq!(Posterior::with_fixed_temperature(&g, 0.5).unwrap().dim(), 12);
        assert!(Posterior::with_fixed_temperature(&g, 0.7).is_err());
    }

    #[test]
    fn structured_roundtrip_and_gradient_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap();
        let x = random_state(4, true, &mut rng);
        let s = UnconstrainedState::from_vec(&x, 4, true).unwrap();
        assert_eq!(s.to_vec(), x);
        let (v, grad) = log_posterior(&s, &g, None).unwrap();
        assert!(v.is_finite());
        assert_eq!(grad.dim(), s.dim());
        assert!(log_posterior(&s, &g, Some(0.5)).is_err());
    }

    #[test]
    fn empty_graph_far_apart_is_prior_dominated() {
        let n = 6;
        let g = Graph::empty(n);
        let post = Posterior::new(&g);
        let mut x = vec![3f64.ln(), -50.0, temperature_to_unconstrained(0.25)];
        x.extend(vec![0.0; n]);
        x.extend((0..n).map(|i| i as f64));
        let value = post.log_density(&x).unwrap();
        let (lp_r, _) = log_radius_prior(x[0]);
        let (lp_a, _, _) = alpha_prior(-50.0, 3.0);
        let (lp_t, _) = temperature_prior(x[2]);
        let (lp_u, _) = logit_uniform_prior(0.0);
        let prior = lp_r + lp_a + lp_t + n as f64 * lp_u;
        assert!((value - prior).abs() < 1e-30f64.max(1e-12 * prior.abs()));
    }

    #[test]
    fn temperature_irrelevant_when_all_distances_equal_alpha() {
        // two nodes: the likelihood depends on T only through (α − d)/(2T)
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let post = Posterior::new(&g);
        let mut x = vec![1.5f64.ln(), 0.0, 0.0, 0.3, -0.2, 0.1, 2.0];
        let (params, pos) = post.constrain(&x);
        let d = crate::geometry::hyperbolic_distance_stable(pos[0], pos[1]);
        x[1] = d;
        let _ = params;
        let eta1 = temperature_to_unconstrained(0.1);
        let eta2 = temperature_to_unconstrained(0.2);
        x[2] = eta1;
        let v1 = post.log_density(&x).unwrap() - temperature_prior(eta1).0;
        x[2] = eta2;
        let v2 = post.log_density(&x).unwrap() - temperature_prior(eta2).0;
        assert!((v1 - v2).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..5 {
            let n = 10;
            let edges: Vec<_> = (0..n)
                .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                .filter(|_| rng.random_bool(0.3))
                .collect();
            let g = Graph::from_edges(n, edges).unwrap();
            let learn = trial % 2 == 0;
            let post = if learn {
                Posterior::new(&g)
            } else {
                Posterior::with_fixed_temperature(&g, 0.3).unwrap()
            };
            let x = random_state(n, learn, &mut rng);
            let mut grad = vec![0.0; x.len()];
            post.log_density_and_grad(&x, &mut grad).unwrap();
            let h = 1e-5;
            for k in 0..x.len() {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                let fd = (post.log_density(&xp).unwrap() - post.log_density(&xm).unwrap()) / (2.0 * h);
                let err = (grad[k] - fd).abs() / fd.abs().max(1.0);
                assert!(err < 1e-4, "coord {k}: analytic {} vs fd {fd}", grad[k]);
            }
        }
    }

    #[test]
    fn isometry_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Graph::from_edges(8, [(0, 1), (1, 2), (2, 5), (5, 7), (3, 4)]).unwrap();
        let post = Posterior::new(&g);
        let x = random_state(8, true, &mut rng);
        let base = post.log_density(&x).unwrap();
        let off = post.layout.theta_offset;
        let mut rotated = x.clone();
        let mut reflected = x.clone();
        for i in 0..8 {
            rotated[off + i] += 1.234;
            reflected[off + i] = -reflected[off + i];
        }
        assert!((post.log_density(&rotated).unwrap() - base).abs() < 1e-10);
        assert!((post.log_density(&reflected).unwrap() - base).abs() < 1e-10);
    }

    #[test]
    fn non_finite_state_is_reported() {
        let g = Graph::empty(3);
        let post = Posterior::new(&g);
        let mut x = vec![0.0; post.dim()];
        x[4] = f64::NAN;
        let err = post.log_density(&x).unwrap_err();
        assert!(matches!(err, Error::Numerical { .. }), "{err}");
    }
}
