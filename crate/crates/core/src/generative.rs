//! Forward simulation of continuous latent space networks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{
    euclidean_distance, hyperbolic_distance_stable, sample_euclidean, sample_sphere,
    sample_uniform_disk, sphere_distance, EuclideanPoint, PolarPoint, SpherePoint,
};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Euclidean spread divisor: `τ = R / 2.448` puts 95% of points inside radius R.
pub const SPREAD_DIVISOR: f64 = 2.448;

/// Upper bound on the temperature.
pub const MAX_TEMPERATURE: f64 = 0.5;

/// Replicate position sets used by [`calibrate_alpha_for_density`].
pub const CALIBRATION_REPLICATES: usize = 20;

/// Relative density tolerance accepted by [`calibrate_alpha_for_density`].
pub const CALIBRATION_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub radius: f64,
    pub alpha: f64,
    pub temperature: f64,
}

impl ModelParams {
    pub fn new(radius: f64, alpha: f64, temperature: f64) -> Result<Self> {
        let p = ModelParams {
            radius,
            alpha,
            temperature,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::domain(format!("R must be positive, got {}", self.radius)));
        }
        if !self.alpha.is_finite() {
            return Err(Error::domain("alpha must be finite"));
        }
        if !(self.temperature > 0.0 && self.temperature <= MAX_TEMPERATURE) {
            return Err(Error::domain(format!(
                "T must lie in (0, 0.5], got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Hyperbolic,
    Euclidean,
    Spherical,
}

impl std::str::FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hyperbolic" | "h" => Ok(Geometry::Hyperbolic),
            "euclidean" | "e" => Ok(Geometry::Euclidean),
            "spherical" | "sphere" | "s" => Ok(Geometry::Spherical),
            other => Err(Error::Config(format!("unknown geometry {other:?}"))),
        }
    }
}

/// Distance-to-probability maps. Only the Fermi-Dirac link carries α and T;
/// the other two are generation presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkFunction {
    #[default]
    FermiDirac,
    TwiceLogistic,
    NegExp,
}

#[inline]
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + eˣ)` without overflow.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Bernoulli log-likelihood `y·ℓ − softplus(ℓ)` at log-odds `ℓ` together
/// with its derivative `y − logistic(ℓ)`, sharing one exponential.
#[inline]
pub fn bernoulli_logit(y: bool, logit: f64) -> (f64, f64) {
    let e = (-logit.abs()).exp();
    // ln(1 + e) = e to within e²/2
    let log1p_e = if e < 1e-9 { e } else { e.ln_1p() };
    let softplus = logit.max(0.0) + log1p_e;
    let p = if logit >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
    if y {
        (logit - softplus, 1.0 - p)
    } else {
        (-softplus, -p)
    }
}

/// Log-odds `(α − d)/(2T)` of the Fermi-Dirac link.
#[inline]
pub fn link_logit(d: f64, alpha: f64, temperature: f64) -> f64 {
    (alpha - d) / (2.0 * temperature)
}

/// `1 / (1 + exp((d − α)/(2T)))`.
pub fn link_probability(d: f64, params: &ModelParams) -> Result<f64> {
    if params.temperature.is_nan() || params.temperature <= 0.0 {
        return Err(Error::domain(format!(
            "temperature must be positive, got {}",
            params.temperature
        )));
    }
    Ok(logistic(link_logit(d, params.alpha, params.temperature)))
}

impl LinkFunction {
    pub fn probability(&self, d: f64, params: &ModelParams) -> Result<f64> {
        match self {
            LinkFunction::FermiDirac => link_probability(d, params),
            LinkFunction::TwiceLogistic => Ok(2.0 * logistic(-d)),
            LinkFunction::NegExp => Ok((-d).exp()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", content = "points", rename_all = "lowercase")]
pub enum Positions {
    Hyperbolic(Vec<PolarPoint>),
    Euclidean(Vec<EuclideanPoint>),
    Spherical(Vec<SpherePoint>),
}

impl Positions {
    pub fn len(&self) -> usize {
        match self {
            Positions::Hyperbolic(p) => p.len(),
            Positions::Euclidean(p) => p.len(),
            Positions::Spherical(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            Positions::Hyperbolic(_) => Geometry::Hyperbolic,
            Positions::Euclidean(_) => Geometry::Euclidean,
            Positions::Spherical(_) => Geometry::Spherical,
        }
    }

    /// Reorders so that new index `perm[i]` holds old point `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        fn apply<T: Copy>(v: &[T], perm: &[usize]) -> Vec<T> {
            let mut out = v.to_vec();
            for (i, &p) in perm.iter().enumerate() {
                out[p] = v[i];
            }
            out
        }
        match self {
            Positions::Hyperbolic(p) => Positions::Hyperbolic(apply(p, perm)),
            Positions::Euclidean(p) => Positions::Euclidean(apply(p, perm)),
            Positions::Spherical(p) => Positions::Spherical(apply(p, perm)),
        }
    }
}

/// Latent positions plus the parameters that turn them into a random graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentConfiguration {
    pub positions: Positions,
    pub params: ModelParams,
    /// Spread of Euclidean positions, and the radius of the sphere for
    /// spherical positions.
    pub tau: f64,
    #[serde(default)]
    pub link: LinkFunction,
}

/// `R / 2.448`.
pub fn matched_spread(radius: f64) -> f64 {
    radius / SPREAD_DIVISOR
}

impl LatentConfiguration {
    pub fn geometry(&self) -> Geometry {
        self.positions.geometry()
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match &self.positions {
            Positions::Hyperbolic(p) => hyperbolic_distance_stable(p[i], p[j]),
            Positions::Euclidean(p) => euclidean_distance(p[i], p[j]),
            Positions::Spherical(p) => self.tau * sphere_distance(p[i], p[j]),
        }
    }

    pub fn probability(&self, i: usize, j: usize) -> f64 {
        let d = self.distance(i, j);
        match self.link {
            LinkFunction::FermiDirac => logistic(link_logit(d, self.params.alpha, self.params.temperature)),
            LinkFunction::TwiceLogistic => 2.0 * logistic(-d),
            LinkFunction::NegExp => (-d).exp(),
        }
    }

    /// Strict upper triangle of pairwise distances, row-major.
    pub fn pairwise_distances(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.distance(i, j));
            }
        }
        out
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        let mut c = self.clone();
        c.params.alpha = alpha;
        c
    }
}

/// Draws `n` i.i.d. positions from the geometry's prior.
pub fn sample_positions<R: Rng + ?Sized>(
    geometry: Geometry,
    n: usize,
    params: ModelParams,
    rng: &mut R,
) -> Result<LatentConfiguration> {
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 nodes, got {n}")));
    }
    params.validate()?;
    let tau = matched_spread(params.radius);
    let positions = match geometry {
        Geometry::Hyperbolic => Positions::Hyperbolic(
            (0..n)
                .map(|_| sample_uniform_disk(params.radius, rng))
                .collect::<Result<_>>()?,
        ),
        Geometry::Euclidean => Positions::Euclidean((0..n).map(|_| sample_euclidean(tau, rng)).collect()),
        Geometry::Spherical => Positions::Spherical((0..n).map(|_| sample_sphere(rng)).collect()),
    };
    Ok(LatentConfiguration {
        positions,
        params,
        tau,
        link: LinkFunction::FermiDirac,
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based uniform in `[0, 1)` for pair `(i, j)` under `key`.
pub fn pair_uniform(key: u64, i: usize, j: usize) -> f64 {
    let (a, b) = (i.min(j) as u64, i.max(j) as u64);
    let h = splitmix64(key ^ splitmix64(a.wrapping_mul(0x1000_0000_01B3) ^ splitmix64(b)));
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Samples every unordered pair independently; one key is drawn from `rng`
/// and each pair gets its own counter-derived uniform.
pub fn generate_graph<R: Rng + ?Sized>(config: &LatentConfiguration, rng: &mut R) -> Graph {
    let key: u64 = rng.random();
    generate_graph_with(config, |i, j| pair_uniform(key, i, j))
}

/// Edge `(i, j)` is present iff `uniform(i, j) < p_ij`.
pub fn generate_graph_with<F>(config: &LatentConfiguration, uniform: F) -> Graph
where
    F: Fn(usize, usize) -> f64,
{
    let n = config.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if uniform(i, j) < config.probability(i, j) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges).expect("pairs are in range and loop-free")
}

/// Mean edge probability over all unordered pairs.
pub fn expected_density(config: &LatentConfiguration) -> f64 {
    let n = config.n();
    let pairs = n * n.saturating_sub(1) / 2;
    if pairs == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            total += config.probability(i, j);
        }
    }
    total / pairs as f64
}

fn mean_density_at(distances: &[Vec<f64>], alpha: f64, temperature: f64) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for set in distances {
        for &d in set {
            total += logistic(link_logit(d, alpha, temperature));
        }
        count += set.len();
    }
    total / count as f64
}

/// Finds α whose Monte Carlo expected density matches `target_density`.
///
/// Uses [`CALIBRATION_REPLICATES`] position sets drawn once (density is then
/// exactly monotone in α) and bisects over `[−10R, 10R]`.
pub fn calibrate_alpha_for_density<R: Rng + ?Sized>(
    geometry: Geometry,
    n: usize,
    radius: f64,
    temperature: f64,
    target_density: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(target_density > 0.0 && target_density < 1.0) {
        return Err(Error::domain(format!("target density must lie in (0, 1), got {target_density}")));
    }
    if geometry == Geometry::Spherical {
        return Err(Error::Calibration("spherical geometry has no calibration support".into()));
    }
    let params = ModelParams::new(radius, radius, temperature)?;
    let mut distances = Vec::with_capacity(CALIBRATION_REPLICATES);
    for _ in 0..CALIBRATION_REPLICATES {
        let seed: u64 = rng.random();
        let config = sample_positions(geometry, n, params, &mut ChaCha8Rng::seed_from_u64(seed))?;
        distances.push(config.pairwise_distances());
    }
    let (mut lo, mut hi) = (-10.0 * radius, 10.0 * radius);
    let reachable_lo = mean_density_at(&distances, lo, temperature);
    let reachable_hi = mean_density_at(&distances, hi, temperature);
    let within = |d: f64| (d - target_density).abs() <= CALIBRATION_TOLERANCE * target_density;
    if target_density < reachable_lo && !within(reachable_lo) || target_density > reachable_hi && !within(reachable_hi) {
        return Err(Error::Calibration(format!(
            "target density {target_density} outside reachable range [{reachable_lo}, {reachable_hi}]"
        )));
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let density = mean_density_at(&distances, mid, temperature);
        if (density - target_density).abs() <= 1e-4 * target_density || hi - lo < 1e-12 {
            break;
        }
        if density < target_density {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(r: f64, a: f64, t: f64) -> ModelParams {
        ModelParams::new(r, a, t).unwrap()
    }

    #[test]
    fn link_values() {
        let p = params(5.0, 5.0, 0.5);
        assert_eq!(link_probability(5.0, &p).unwrap(), 0.5);
        let v = link_probability(5.0 + 3f64.ln(), &p).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
        let cold = params(5.0, 5.0, 0.01);
        assert!(1.0 - link_probability(4.0, &cold).unwrap() < 1e-20);
        assert!(link_probability(6.0, &cold).unwrap() < 1e-20);
        let bad = ModelParams {
            radius: 1.0,
            alpha: 1.0,
            temperature: 0.0,
        };
        assert!(link_probability(1.0, &bad).is_err());
    }

    #[test]
    fn link_monotone_and_threshold_limit() {
        let p = params(5.0, 2.0, 0.3);
        let mut prev = 1.0;
        for k in 0..200 {
            let d = -5.0 + 0.05 * k as f64;
            let v = link_probability(d, &p).unwrap();
            assert!(v < prev || (v == prev && v == 0.0));
            prev = v;
        }
        let mut prev = 0.0;
        for k in 0..200 {
            let alpha = -5.0 + 0.05 * k as f64;
            let v = link_probability(1.0, &params(5.0, alpha, 0.3)).unwrap();
            assert!(v > prev);
            prev = v;
        }
        let frozen = params(5.0, 3.0, 1e-4);
        for d in [0.0, 1.0, 2.9, 3.1, 4.0, 10.0] {
            let ind = if d < 3.0 { 1.0 } else { 0.0 };
            assert!((link_probability(d, &frozen).unwrap() - ind).abs() < 1e-8);
        }
    }

    #[test]
    fn alternative_links() {
        let p = params(5.0, 5.0, 0.5);
        assert_eq!(LinkFunction::TwiceLogistic.probability(0.0, &p).unwrap(), 1.0);
        assert!((LinkFunction::NegExp.probability(1.0, &p).unwrap() - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 1.0, 0.1).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.6).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 0.1).is_err());
        assert!(ModelParams::new(1.0, -3.0, 0.5).is_ok());
    }

    #[test]
    fn sample_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = params(5.0, 5.0, 0.1);
        assert!(sample_positions(Geometry::Hyperbolic, 1, p, &mut rng).is_err());
        for g in [Geometry::Hyperbolic, Geometry::Euclidean, Geometry::Spherical] {
            let c = sample_positions(g, 2, p, &mut rng).unwrap();
            assert_eq!(c.n(), 2);
            assert_eq!(c.geometry(), g);
        }
        let c = sample_positions(Geometry::Hyperbolic, 10_000, p, &mut rng).unwrap();
        let Positions::Hyperbolic(points) = &c.positions else { unreachable!() };
        assert!(points.iter().all(|q| q.r() <= 5.0));
    }

    #[test]
    fn euclidean_spread_covers_95_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = sample_positions(Geometry::Euclidean, 100_000, params(5.0, 5.0, 0.1), &mut rng).unwrap();
        let Positions::Euclidean(points) = &c.positions else { unreachable!() };
        let inside = points.iter().filter(|q| q.norm() <= 5.0).count() as f64 / points.len() as f64;
        assert!((inside - 0.95).abs() < 0.01, "fraction {inside}");
        assert!((c.tau - 5.0 / 2.448).abs() < 1e-15);
    }

    #[test]
    fn generated_graph_is_symmetric_and_loop_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = sample_positions(Geometry::Hyperbolic, 60, params(5.0, 5.0, 0.2), &mut rng).unwrap();
        let g = generate_graph(&c, &mut rng);
        let adj = g.adjacency_matrix();
        for (i, row) in adj.iter().enumerate() {
            assert_eq!(row[i], 0);
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(v, adj[j][i]);
            }
        }
    }

    #[test]
    fn cold_generation_thresholds_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = sample_positions(Geometry::Hyperbolic, 100, params(5.0, 5.0, 0.01), &mut rng).unwrap();
        let g = generate_graph(&c, &mut rng);
        for i in 0..100 {
            for j in (i + 1)..100 {
                let d = c.distance(i, j);
                if (d - 5.0).abs() >= 10.0 * 0.01 {
                    assert_eq!(g.has_edge(i, j), d < 5.0);
                }
            }
        }
    }

    #[test]
    fn expected_density_cases() {
        let a = PolarPoint::new(1.0, 0.0).unwrap();
        let b = PolarPoint::new(2.0, 1.0).unwrap();
        let d = hyperbolic_distance_stable(a, b);
        let p = params(5.0, d, 0.3);
        let c = LatentConfiguration {
            positions: Positions::Hyperbolic(vec![a, b]),
            params: p,
            tau: 1.0,
            link: LinkFunction::FermiDirac,
        };
        assert_eq!(expected_density(&c), 0.5);
        let c2 = c.with_alpha(1.0);
        assert_eq!(expected_density(&c2), link_probability(d, &c2.params).unwrap());
    }

    #[test]
    fn bernoulli_logit_matches_direct_form() {
        for &l in &[-800.0, -40.0, -3.0, -1e-3, 0.0, 0.7, 25.0, 900.0] {
            for y in [false, true] {
                let (ll, g) = bernoulli_logit(y, l);
                let yv = if y { 1.0 } else { 0.0 };
                assert!((ll - (yv * l - softplus(l))).abs() <= 1e-15 * (1.0 + l.abs()));
                assert!((g - (yv - logistic(l))).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn pair_uniforms_are_symmetric_and_in_range() {
        for i in 0..50 {
            for j in 0..50 {
                let u = pair_uniform(99, i, j);
                assert!((0.0..1.0).contains(&u));
                assert_eq!(u, pair_uniform(99, j, i));
            }
        }
        assert_ne!(pair_uniform(1, 0, 1), pair_uniform(2, 0, 1));
    }

    #[test]
    fn calibration_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(calibrate_alpha_for_density(Geometry::Hyperbolic, 50, 5.0, 0.1, 1.5, &mut rng).is_err());
        assert!(calibrate_alpha_for_density(Geometry::Spherical, 50, 5.0, 0.1, 0.1, &mut rng).is_err());
        // a small hot disk bounds the link logit, so 0.999 lies outside the bracket
        let err = calibrate_alpha_for_density(Geometry::Hyperbolic, 50, 0.1, 0.5, 0.999, &mut rng);
        assert!(matches!(err, Err(Error::Calibration(_))), "{err:?}");
    }
}
