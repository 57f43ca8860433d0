//! Canonical orientation of fitted embeddings.
//!
//! Distances are invariant under rotations and reflections of the latent
//! space, so raw embeddings from different fits are not directly comparable.
//! The hyperbolic canonical form puts the most central node (smallest radius,
//! lowest id on ties) at angle zero, then reflects across the horizontal axis
//! when the weighted angular mass `Σ wᵢ sin θᵢ` is negative.

use std::fmt::Write as _;
use std::str::FromStr;

use hcls::geometry::normalize_angle;
use hcls::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RotationWeights {
    #[default]
    Degree,
    Uniform,
}

impl FromStr for RotationWeights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree" => Ok(RotationWeights::Degree),
            "uniform" => Ok(RotationWeights::Uniform),
            other => Err(Error::Config(format!("unknown rotation weights {other:?}"))),
        }
    }
}

impl RotationWeights {
    pub fn weights(self, degrees: &[usize]) -> Vec<f64> {
        match self {
            RotationWeights::Degree => degrees.iter().map(|&d| d as f64).collect(),
            RotationWeights::Uniform => vec![1.0; degrees.len()],
        }
    }
}

fn argmin_lowest_id(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// Rotates and reflects `(r, θ)` points into canonical position.
pub fn canonicalize_hyperbolic(points: &[[f64; 2]], weights: &[f64]) -> Vec<[f64; 2]> {
    let Some(anchor) = argmin_lowest_id(points.iter().map(|p| p[0])) else {
        return Vec::new();
    };
    let shift = points[anchor][1];
    let mut out: Vec<[f64; 2]> = points
        .iter()
        .enumerate()
        .map(|(i, p)| [p[0], if i == anchor { 0.0 } else { normalize_angle(p[1] - shift) }])
        .collect();
    let mass: f64 = out.iter().zip(weights).map(|(p, w)| w * p[1].sin()).sum();
    if mass < 0.0 {
        for p in &mut out {
            p[1] = normalize_angle(-p[1]);
        }
    }
    out
}

/// Canonicalizes Euclidean points: centre on the centroid, rotate the node
/// nearest the centroid onto the positive x-axis, reflect when `Σ wᵢ yᵢ < 0`.
pub fn canonicalize_euclidean(points: &[[f64; 2]], weights: &[f64]) -> Vec<[f64; 2]> {
    if points.is_empty() {
        return Vec::new();
    }
    let c = centroid(points);
    let centred: Vec<[f64; 2]> = points.iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect();
    let anchor = argmin_lowest_id(centred.iter().map(|p| p[0].hypot(p[1]))).expect("non-empty");
    let phi = centred[anchor][1].atan2(centred[anchor][0]);
    let (s, co) = (-phi).sin_cos();
    let mut out: Vec<[f64; 2]> = centred
        .iter()
        .map(|p| [co * p[0] - s * p[1], s * p[0] + co * p[1]])
        .collect();
    let mass: f64 = out.iter().zip(weights).map(|(p, w)| w * p[1]).sum();
    if mass < 0.0 {
        for p in &mut out {
            p[1] = -p[1];
        }
    }
    out
}

fn centroid(points: &[[f64; 2]]) -> [f64; 2] {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p[0], b + p[1]));
    [sx / n, sy / n]
}

/// Orthogonal Procrustes alignment of `points` onto `reference`: the
/// translation plus rotation or reflection minimizing squared error.
pub fn procrustes_align(points: &[[f64; 2]], reference: &[[f64; 2]]) -> Result<Vec<[f64; 2]>> {
    if points.len() != reference.len() || points.is_empty() {
        return Err(Error::Config(format!(
            "reference has {} points, embedding has {}",
            reference.len(),
            points.len()
        )));
    }
    let (cp, cr) = (centroid(points), centroid(reference));
    let (mut sxx, mut sxy, mut syx, mut syy) = (0.0, 0.0, 0.0, 0.0);
    for (p, q) in points.iter().zip(reference) {
        let (x, y) = (p[0] - cp[0], p[1] - cp[1]);
        let (u, v) = (q[0] - cr[0], q[1] - cr[1]);
        sxx += x * u;
        sxy += x * v;
        syx += y * u;
        syy += y * v;
    }
    // best rotation angle and best reflection angle in closed form
    let rot = (sxy - syx).atan2(sxx + syy);
    let rot_score = (sxx + syy).hypot(sxy - syx);
    let refl = (sxy + syx).atan2(sxx - syy);
    let refl_score = (sxx - syy).hypot(sxy + syx);
    let (s, c) = if rot_score >= refl_score { rot.sin_cos() } else { refl.sin_cos() };
    let reflect = rot_score < refl_score;
    Ok(points
        .iter()
        .map(|p| {
            let (x, y) = (p[0] - cp[0], if reflect { cp[1] - p[1] } else { p[1] - cp[1] });
            [c * x - s * y + cr[0], s * x + c * y + cr[1]]
        })
        .collect())
}

/// `(tanh(r/2) cos θ, tanh(r/2) sin θ)`.
pub fn poincare(point: [f64; 2]) -> [f64; 2] {
    let rho = (0.5 * point[0]).tanh();
    let (s, c) = point[1].sin_cos();
    [rho * c, rho * s]
}

/// Scatter plot of planar coordinates; marker area grows with degree.
pub fn svg_scatter(coords: &[[f64; 2]], degrees: &[usize], unit_disk: bool) -> String {
    let size = 600.0;
    let half = size / 2.0;
    let extent = if unit_disk {
        1.0
    } else {
        coords.iter().flat_map(|p| [p[0].abs(), p[1].abs()]).fold(1e-12, f64::max)
    };
    let scale = 0.95 * half / extent;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if unit_disk {
        let _ = writeln!(
            s,
            r##"<circle cx="{half}" cy="{half}" r="{:.2}" fill="none" stroke="#999"/>"##,
            scale
        );
    }
    let max_deg = degrees.iter().copied().max().unwrap_or(1).max(1) as f64;
    for (i, p) in coords.iter().enumerate() {
        let d = degrees.get(i).copied().unwrap_or(0) as f64;
        let radius = 1.5 + 4.0 * (d / max_deg).sqrt();
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="#c0392b" fill-opacity="0.7"><title>{i}</title></circle>"##,
            half + scale * p[0],
            half - scale * p[1],
            radius
        );
    }
    s.push_str("</svg>\n");
    s
}
