//! Latent geometries: the native polar model of the hyperbolic plane at fixed
//! curvature -1, the Euclidean plane and the unit sphere.
//!
//! Hyperbolic points are stored in native coordinates `(r, θ)` where `r` is the
//! geodesic distance from the origin. All distance kernels here are pure
//! functions on value types.

use std::f64::consts::{LN_2, PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sectional curvature of the hyperbolic latent space. Fixed, never estimated.
pub const CURVATURE: f64 = -1.0;

/// Floor applied to the arccosh derivative denominator near coincident points.
pub const GRAD_DENOM_FLOOR: f64 = 1e-12;

/// Radii beyond which the distance kernels switch to log-domain arithmetic.
const LOG_DOMAIN_RADIUS: f64 = 300.0;

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Angular separation `π − |π − |θ₁ − θ₂||` in `[0, π]`.
pub fn angular_separation(theta1: f64, theta2: f64) -> f64 {
    let diff = (normalize_angle(theta1) - normalize_angle(theta2)).abs();
    // folding through π would round small separations to a multiple of ulp(π)
    if diff > PI {
        TAU - diff
    } else {
        diff
    }
}

/// `arccosh(1 + x)` for `x ≥ 0`, accurate for tiny `x`.
pub fn acosh1p(x: f64) -> f64 {
    let x = x.max(0.0);
    if x > 1e150 {
        // sqrt(x(x+2)) would overflow; 1 + x + sqrt(x(x+2)) = 2(x+1) to O(1/x)
        return LN_2 + x.ln_1p();
    }
    (x + (x * (x + 2.0)).sqrt()).ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolar", into = "RawPolar")]
pub struct PolarPoint {
    r: f64,
    theta: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPolar {
    r: f64,
    theta: f64,
}

impl TryFrom<RawPolar> for PolarPoint {
    type Error = Error;

    fn try_from(raw: RawPolar) -> Result<Self> {
        PolarPoint::new(raw.r, raw.theta)
    }
}

impl From<PolarPoint> for RawPolar {
    fn from(p: PolarPoint) -> Self {
        RawPolar {
            r: p.r,
            theta: p.theta,
        }
    }
}

impl PolarPoint {
    /// Builds a point, normalizing the angle to `[0, 2π)`.
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::domain(format!("radial coordinate must be finite and >= 0, got {r}")));
        }
        if !theta.is_finite() {
            return Err(Error::domain(format!("angle must be finite, got {theta}")));
        }
        Ok(PolarPoint {
            r,
            theta: normalize_angle(theta),
        })
    }

    pub fn origin() -> Self {
        PolarPoint { r: 0.0, theta: 0.0 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Poincaré-disk radius `tanh(r/2)` of this point.
    pub fn poincare_radius(&self) -> f64 {
        (0.5 * self.r).tanh()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanPoint {
    pub x: f64,
    pub y: f64,
}

impl EuclideanPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::domain("euclidean coordinates must be finite"));
        }
        Ok(EuclideanPoint { x, y })
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    x: f64,
    y: f64,
    z: f64,
}

impl SpherePoint {
    /// Projects a nonzero vector onto the unit sphere.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::domain("sphere point needs a finite nonzero vector"));
        }
        Ok(SpherePoint {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// Draws a point uniformly (by hyperbolic area) from the disk of radius `radius`.
pub fn sample_uniform_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Result<PolarPoint> {
    check_radius(radius)?;
    let u: f64 = rng.random();
    let theta: f64 = rng.random::<f64>() * TAU;
    PolarPoint::new(radius_from_quantile(u, radius), theta)
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::domain(format!("disk radius must be positive, got {radius}")));
    }
    Ok(())
}

/// Inverse of the radial CDF: `arccosh(1 + (cosh R − 1)·u)`.
pub fn radius_from_quantile(u: f64, radius: f64) -> f64 {
    let half = (0.5 * radius).sinh();
    acosh1p(2.0 * half * half * u).min(radius)
}

/// Radius reached from a logit-scale quantile `ω` (`u = logistic(ω)`), with
/// partials `∂r/∂ω` and `∂r/∂R`.
#[derive(Debug, Clone, Copy)]
pub struct RadialMap {
    pub r: f64,
    pub dr_domega: f64,
    pub dr_dradius: f64,
}

pub fn radius_from_logit(omega: f64, radius: f64) -> RadialMap {
    let u = crate::generative::logistic(omega);
    let one_minus_u = crate::generative::logistic(-omega);
    let half = 0.5 * radius;
    let c = 2.0 * half.sinh().powi(2);
    let cu = c * u;
    let denom = (cu + 2.0).sqrt();
    RadialMap {
        r: acosh1p(cu).min(radius),
        dr_domega: one_minus_u * (cu / (cu + 2.0)).sqrt(),
        dr_dradius: std::f64::consts::SQRT_2 * u.sqrt() * half.cosh() / denom,
    }
}

/// Radial CDF of the uniform disk, `(cosh r − 1)/(cosh R − 1)`.
pub fn disk_radial_cdf(r: f64, radius: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    if r >= radius {
        return 1.0;
    }
    let num = (0.5 * r).sinh();
    let den = (0.5 * radius).sinh();
    (num / den).powi(2)
}

pub fn sample_euclidean<R: Rng + ?Sized>(spread: f64, rng: &mut R) -> EuclideanPoint {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    EuclideanPoint {
        x: spread * x,
        y: spread * y,
    }
}

pub fn sample_sphere<R: Rng + ?Sized>(rng: &mut R) -> SpherePoint {
    loop {
        let v: [f64; 3] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        if let Ok(p) = SpherePoint::new(v[0], v[1], v[2]) {
            return p;
        }
    }
}

/// Textbook hyperbolic law of cosines,
/// `arccosh(cosh r₁ cosh r₂ − sinh r₁ sinh r₂ cos Δθ)`.
///
/// Loses precision for nearby points at large radius; inference uses
/// [`hyperbolic_distance_stable`].
pub fn hyperbolic_distance(a: PolarPoint, b: PolarPoint) -> f64 {
    if a == b {
        return 0.0;
    }
    let dtheta = angular_separation(a.theta, b.theta);
    let arg = a.r.cosh() * b.r.cosh() - a.r.sinh() * b.r.sinh() * dtheta.cos();
    arg.max(1.0).acosh()
}

/// `arccosh(1 + 2(sinh²((r₁−r₂)/2) + sinh r₁ sinh r₂ sin²(Δθ/2)))`, finite for
/// radii up to the f64 exponent range.
pub fn hyperbolic_distance_stable(a: PolarPoint, b: PolarPoint) -> f64 {
    let dtheta = angular_separation(a.theta, b.theta);
    if a.r.max(b.r) <= LOG_DOMAIN_RADIUS {
        let sh = (0.5 * (a.r - b.r)).sinh();
        let s = (0.5 * dtheta).sin();
        let big_a = sh * sh + a.r.sinh() * b.r.sinh() * s * s;
        acosh1p(2.0 * big_a)
    } else {
        let ln_a = log_half_chord(a.r, b.r, dtheta);
        distance_from_ln_half_chord(ln_a)
    }
}

/// `ln A` where `A = sinh²((r₁−r₂)/2) + sinh r₁ sinh r₂ sin²(Δθ/2)`.
fn log_half_chord(r1: f64, r2: f64, dtheta: f64) -> f64 {
    let ln_radial = 2.0 * ln_sinh((0.5 * (r1 - r2)).abs());
    let ln_angular = ln_sinh(r1) + ln_sinh(r2) + 2.0 * (0.5 * dtheta).sin().abs().ln();
    log_add_exp(ln_radial, ln_angular)
}

fn distance_from_ln_half_chord(ln_a: f64) -> f64 {
    if ln_a < 30.0 {
        acosh1p(2.0 * ln_a.exp())
    } else {
        // arccosh(1 + 2A) = ln 2A + ln(1 + 1/(2A) + sqrt(1 + 1/A))
        let inv = (-ln_a).exp();
        LN_2 + ln_a + (1.0 + 0.5 * inv + (1.0 + inv).sqrt()).ln()
    }
}

/// `ln sinh(x)` for `x ≥ 0`; `-inf` at zero.
pub(crate) fn ln_sinh(x: f64) -> f64 {
    if x < 20.0 {
        x.sinh().ln()
    } else {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    }
}

fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    if x < 20.0 {
        x.cosh().ln()
    } else {
        x - LN_2 + (-2.0 * x).exp().ln_1p()
    }
}

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Partial derivatives of the stable hyperbolic distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceGradient {
    pub dr1: f64,
    pub dtheta1: f64,
    pub dr2: f64,
    pub dtheta2: f64,
}

/// Analytic gradient of [`hyperbolic_distance_stable`]; errors at coincident points.
pub fn hyperbolic_distance_grad(a: PolarPoint, b: PolarPoint) -> Result<DistanceGradient> {
    let (d, grad) = distance_and_grad(a, b);
    if d == 0.0 {
        return Err(Error::GradientSingular);
    }
    Ok(grad)
}

/// Distance and gradient with the arccosh derivative denominator floored at
/// [`GRAD_DENOM_FLOOR`], so coincident points yield a zero gradient.
pub fn hyperbolic_distance_grad_clamped(a: PolarPoint, b: PolarPoint) -> (f64, DistanceGradient) {
    distance_and_grad(a, b)
}

fn distance_and_grad(a: PolarPoint, b: PolarPoint) -> (f64, DistanceGradient) {
    if a.r.max(b.r) <= LOG_DOMAIN_RADIUS {
        let pa = NodeTrig::new(a.r, a.theta);
        let pb = NodeTrig::new(b.r, b.theta);
        let pd = pair_distance_grad(&pa, &pb);
        return (
            pd.distance,
            DistanceGradient {
                dr1: pd.d_ra,
                dtheta1: pd.d_ta,
                dr2: pd.d_rb,
                dtheta2: -pd.d_ta,
            },
        );
    }
    distance_and_grad_log(a, b)
}

fn distance_and_grad_log(a: PolarPoint, b: PolarPoint) -> (f64, DistanceGradient) {
    let diff = a.theta - b.theta;
    let dtheta = angular_separation(a.theta, b.theta);
    let ln_a = log_half_chord(a.r, b.r, dtheta);
    let d = distance_from_ln_half_chord(ln_a);
    // dd/dA = 1/sqrt(A(A+1)); work with ln of each partial of A.
    let ln_scale = -0.5 * (2.0 * ln_a + (-ln_a).exp().ln_1p());
    let ln_s2 = 2.0 * (0.5 * diff).sin().abs().ln();
    let radial = |ra: f64, rb: f64| -> f64 {
        // ½ sinh(ra − rb) + cosh ra sinh rb s²
        let delta = ra - rb;
        let t1 = (delta.signum(), ln_sinh(delta.abs()) - LN_2);
        let t2 = (1.0, ln_cosh(ra) + ln_sinh(rb) + ln_s2);
        signed_exp(t1, ln_scale) + signed_exp(t2, ln_scale)
    };
    let dtheta1 = {
        let sin_diff = diff.sin();
        let ln_t = ln_sinh(a.r) + ln_sinh(b.r) - LN_2 + sin_diff.abs().ln();
        signed_exp((sin_diff.signum(), ln_t), ln_scale)
    };
    (
        d,
        DistanceGradient {
            dr1: radial(a.r, b.r),
            dtheta1,
            dr2: radial(b.r, a.r),
            dtheta2: -dtheta1,
        },
    )
}

fn signed_exp((sign, ln_mag): (f64, f64), ln_scale: f64) -> f64 {
    if ln_mag == f64::NEG_INFINITY {
        0.0
    } else {
        sign * (ln_mag + ln_scale).exp()
    }
}

/// Per-node trigonometric cache for pairwise distance kernels.
///
/// Angles enter only through half-angle sines and cosines, so unwrapped angles
/// are handled without reduction.
#[derive(Debug, Clone, Copy, Default)]
pub struct NodeTrig {
    pub r: f64,
    /// `e^{r/2}` and `e^{−r/2}`, so `sinh((r_a − r_b)/2)` needs no exponential.
    pub exp_half: f64,
    pub exp_neg_half: f64,
    pub sinh_r: f64,
    pub cosh_r: f64,
    pub sin_half: f64,
    pub cos_half: f64,
}

impl NodeTrig {
    pub fn new(r: f64, theta: f64) -> Self {
        let (sin_half, cos_half) = (0.5 * theta).sin_cos();
        let exp_half = (0.5 * r).exp();
        NodeTrig {
            r,
            exp_half,
            exp_neg_half: 1.0 / exp_half,
            sinh_r: r.sinh(),
            cosh_r: r.cosh(),
            sin_half,
            cos_half,
        }
    }
}

/// Distance between two cached nodes and its partials with respect to the first
/// node's radius and angle and the second node's radius. The second node's
/// angular partial is `-d_ta`.
#[derive(Debug, Clone, Copy)]
pub struct PairDistance {
    pub distance: f64,
    pub d_ra: f64,
    pub d_rb: f64,
    pub d_ta: f64,
}

/// `sinh((r_a − r_b)/2)`; falls back to the direct form for nearby radii,
/// where the cached product difference cancels.
#[inline]
fn half_radial_sinh(a: &NodeTrig, b: &NodeTrig) -> f64 {
    let x = 0.5 * (a.r - b.r);
    if x.abs() < 0.1 {
        x.sinh()
    } else {
        0.5 * (a.exp_half * b.exp_neg_half - a.exp_neg_half * b.exp_half)
    }
}

#[inline]
pub fn pair_distance_grad(a: &NodeTrig, b: &NodeTrig) -> PairDistance {
    let sh = half_radial_sinh(a, b);
    let ch = (1.0 + sh * sh).sqrt();
    // sin and cos of (θa − θb)/2
    let s = a.sin_half * b.cos_half - a.cos_half * b.sin_half;
    let c = a.cos_half * b.cos_half + a.sin_half * b.sin_half;
    let s2 = s * s;
    let ss = a.sinh_r * b.sinh_r;
    let big_a = sh * sh + ss * s2;
    let x = 2.0 * big_a;
    let root = (x * (x + 2.0)).sqrt();
    let distance = (x + root).ln_1p();
    let dd_da = 2.0 / root.max(GRAD_DENOM_FLOOR);
    let shch = sh * ch;
    PairDistance {
        distance,
        d_ra: dd_da * (shch + a.cosh_r * b.sinh_r * s2),
        d_rb: dd_da * (-shch + a.sinh_r * b.cosh_r * s2),
        d_ta: dd_da * ss * s * c,
    }
}

/// Distance-only variant of [`pair_distance_grad`].
#[inline]
pub fn pair_distance(a: &NodeTrig, b: &NodeTrig) -> f64 {
    let sh = half_radial_sinh(a, b);
    let s = a.sin_half * b.cos_half - a.cos_half * b.sin_half;
    acosh1p(2.0 * (sh * sh + a.sinh_r * b.sinh_r * s * s))
}

pub fn euclidean_distance(a: EuclideanPoint, b: EuclideanPoint) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Great-circle distance on the unit sphere, in `[0, π]`.
pub fn sphere_distance(a: SpherePoint, b: SpherePoint) -> f64 {
    let dot = a.x * b.x + a.y * b.y + a.z * b.z;
    dot.clamp(-1.0, 1.0).acos()
}
