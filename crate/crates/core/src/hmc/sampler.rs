//! Static-trajectory HMC with an identity mass matrix and dual-averaging
//! step-size adaptation during warmup.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;

/// A differentiable log density on ℝᵈ.
pub trait LogDensity {
    fn dim(&self) -> usize;

    /// Returns `ln p(x)` and writes `∇ ln p(x)` into `grad`.
    fn log_density_and_grad(&self, x: &[f64], grad: &mut [f64]) -> Result<f64>;
}

impl LogDensity for super::posterior::Posterior {
    fn dim(&self) -> usize {
        super::posterior::Posterior::dim(self)
    }

    fn log_density_and_grad(&self, x: &[f64], grad: &mut [f64]) -> Result<f64> {
        super::posterior::Posterior::log_density_and_grad(self, x, grad)
    }
}

/// Energy error beyond which a trajectory counts as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1000.0;

#[derive(Debug, Clone)]
pub struct SamplerSettings {
    pub warmup: usize,
    pub draws: usize,
    /// Initial step size; `None` runs a doubling/halving search first.
    pub step_size: Option<f64>,
    pub n_leapfrog: usize,
    pub target_accept: f64,
    /// Relative uniform jitter applied to the step size each iteration.
    pub step_jitter: f64,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        SamplerSettings {
            warmup: 1000,
            draws: 1000,
            step_size: None,
            n_leapfrog: 32,
            target_accept: 0.8,
            step_jitter: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    /// Post-warmup states, unconstrained.
    pub samples: Vec<Vec<f64>>,
    pub log_densities: Vec<f64>,
    pub acceptance_rate: f64,
    pub divergences: usize,
    pub warmup_divergences: usize,
    pub step_size: f64,
}

/// Phase space point with cached density and gradient.
#[derive(Debug, Clone)]
pub struct PhasePoint {
    pub position: Vec<f64>,
    pub momentum: Vec<f64>,
    pub log_density: f64,
    pub grad: Vec<f64>,
}

impl PhasePoint {
    pub fn new<T: LogDensity + ?Sized>(target: &T, position: Vec<f64>, momentum: Vec<f64>) -> Result<Self> {
        let mut grad = vec![0.0; position.len()];
        let log_density = target.log_density_and_grad(&position, &mut grad)?;
        Ok(PhasePoint {
            position,
            momentum,
            log_density,
            grad,
        })
    }

    /// `−ln p(x) + ½‖p‖²`.
    pub fn hamiltonian(&self) -> f64 {
        -self.log_density + 0.5 * self.momentum.iter().map(|p| p * p).sum::<f64>()
    }
}

/// Integrates `steps` leapfrog steps in place.
pub fn leapfrog<T: LogDensity + ?Sized>(target: &T, point: &mut PhasePoint, step_size: f64, steps: usize) -> Result<()> {
    for _ in 0..steps {
        for (p, g) in point.momentum.iter_mut().zip(&point.grad) {
            *p += 0.5 * step_size * g;
        }
        for (x, p) in point.position.iter_mut().zip(&point.momentum) {
            *x += step_size * p;
        }
        point.log_density = target.log_density_and_grad(&point.position, &mut point.grad)?;
        for (p, g) in point.momentum.iter_mut().zip(&point.grad) {
            *p += 0.5 * step_size * g;
        }
    }
    Ok(())
}

fn draw_momentum<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.sample(StandardNormal)).collect()
}

/// One proposal; returns the Metropolis acceptance probability and whether
/// the trajectory diverged. Numerical failures inside the trajectory count as
/// divergences.
fn transition<T: LogDensity + ?Sized, R: Rng + ?Sized>(
    target: &T,
    current: &mut PhasePoint,
    step_size: f64,
    steps: usize,
    rng: &mut R,
) -> (f64, bool) {
    current.momentum = draw_momentum(current.position.len(), rng);
    let h0 = current.hamiltonian();
    let mut proposal = current.clone();
    if leapfrog(target, &mut proposal, step_size, steps).is_err() {
        return (0.0, true);
    }
    let h1 = proposal.hamiltonian();
    let delta = h1 - h0;
    if !delta.is_finite() || delta > DIVERGENCE_THRESHOLD {
        return (0.0, true);
    }
    let accept_prob = (-delta).exp().min(1.0);
    if rng.random::<f64>() < accept_prob {
        *current = proposal;
    }
    (accept_prob, false)
}

fn find_reasonable_step<T: LogDensity + ?Sized, R: Rng + ?Sized>(
    target: &T,
    start: &PhasePoint,
    rng: &mut R,
) -> f64 {
    let mut eps: f64 = 0.1;
    let log_half = 0.5f64.ln();
    let accept_log = |eps: f64, rng: &mut R| -> f64 {
        let mut p = start.clone();
        p.momentum = draw_momentum(p.position.len(), rng);
        let h0 = p.hamiltonian();
        match leapfrog(target, &mut p, eps, 1) {
            Ok(()) => {
                let d = h0 - p.hamiltonian();
                if d.is_finite() {
                    d
                } else {
                    f64::NEG_INFINITY
                }
            }
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let up = accept_log(eps, rng) > log_half;
    for _ in 0..60 {
        let a = accept_log(eps, rng);
        if up && a <= log_half {
            return eps / 2.0;
        }
        if !up && a > log_half {
            return eps;
        }
        eps = if up { eps * 2.0 } else { eps / 2.0 };
    }
    eps
}

/// Dual-averaging state (Nesterov primal-dual, as used for HMC step sizes).
#[derive(Debug, Clone)]
pub struct DualAveraging {
    mu: f64,
    target: f64,
    h_bar: f64,
    log_eps_bar: f64,
    count: f64,
    gamma: f64,
    t0: f64,
    kappa: f64,
}

impl DualAveraging {
    pub fn new(initial_step: f64, target: f64) -> Self {
        DualAveraging {
            mu: (10.0 * initial_step).ln(),
            target,
            h_bar: 0.0,
            log_eps_bar: 0.0,
            count: 0.0,
            gamma: 0.05,
            t0: 10.0,
            kappa: 0.75,
        }
    }

    /// Feeds one acceptance statistic; returns the next step size to use.
    pub fn update(&mut self, accept_prob: f64) -> f64 {
        self.count += 1.0;
        let m = self.count;
        let w = 1.0 / (m + self.t0);
        self.h_bar = (1.0 - w) * self.h_bar + w * (self.target - accept_prob);
        let log_eps = self.mu - m.sqrt() / self.gamma * self.h_bar;
        let eta = m.powf(-self.kappa);
        self.log_eps_bar = eta * log_eps + (1.0 - eta) * self.log_eps_bar;
        log_eps.exp()
    }

    /// Averaged step size for sampling after warmup.
    pub fn final_step(&self) -> f64 {
        self.log_eps_bar.exp()
    }
}

/// Runs one chain from `init`.
pub fn run_chain<T: LogDensity + ?Sized, R: Rng + ?Sized>(
    target: &T,
    init: Vec<f64>,
    settings: &SamplerSettings,
    rng: &mut R,
) -> Result<ChainOutput> {
    let dim = target.dim();
    let mut current = PhasePoint::new(target, init, vec![0.0; dim])?;
    let mut step = match settings.step_size {
        Some(s) => s,
        None => find_reasonable_step(target, &current, rng),
    };
    let mut adapt = DualAveraging::new(step, settings.target_accept);
    let jitter = |rng: &mut R| 1.0 + settings.step_jitter * (2.0 * rng.random::<f64>() - 1.0);

    let mut warmup_divergences = 0;
    for _ in 0..settings.warmup {
        let eps = step * jitter(rng);
        let (accept, divergent) = transition(target, &mut current, eps, settings.n_leapfrog, rng);
        warmup_divergences += usize::from(divergent);
        step = adapt.update(accept);
    }
    if settings.warmup > 0 {
        step = adapt.final_step();
    }

    let mut samples = Vec::with_capacity(settings.draws);
    let mut log_densities = Vec::with_capacity(settings.draws);
    let mut accept_sum = 0.0;
    let mut divergences = 0;
    for _ in 0..settings.draws {
        let eps = step * jitter(rng);
        let (accept, divergent) = transition(target, &mut current, eps, settings.n_leapfrog, rng);
        accept_sum += accept;
        divergences += usize::from(divergent);
        samples.push(current.position.clone());
        log_densities.push(current.log_density);
    }
    Ok(ChainOutput {
        samples,
        log_densities,
        acceptance_rate: if settings.draws > 0 {
            accept_sum / settings.draws as f64
        } else {
            0.0
        },
        divergences,
        warmup_divergences,
        step_size: step,
    })
}
