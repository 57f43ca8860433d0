//! Two-dimensional spectral layout used to seed latent positions.
//!
//! Works on `M = D^-½ (A + J/N) D^-½`, where `J` is all ones. The `J/N`
//! regularizer adds a weak edge between every pair, so disconnected graphs
//! still have a single trivial eigenvector `D^½·1` (eigenvalue 1). The next
//! two eigenvectors give the layout. They are found by block subspace
//! iteration on the shifted operator `(M + I)/2`, deflated against the
//! trivial vector, with a Rayleigh-Ritz step at the end, so the cost is
//! O((N + M)·block) per iteration and the matrix is never formed.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

const BLOCK: usize = 8;
const MAX_ITERATIONS: usize = 2000;
const TOLERANCE: f64 = 1e-10;

/// Leading nontrivial eigenpairs of `M`, largest first. Vectors are unit
/// length in the symmetric basis.
pub(crate) fn leading_eigenpairs(g: &Graph, k: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = g.n();
    if k == 0 || k + 1 > n {
        return Err(Error::domain(format!("cannot take {k} nontrivial eigenvectors of a {n}-node graph")));
    }
    let b = BLOCK.max(k + 2).min(n - 1);
    let scale: Vec<f64> = (0..n).map(|i| ((g.degree(i) + 1) as f64).sqrt().recip()).collect();
    let mut trivial: Vec<f64> = scale.iter().map(|s| s.recip()).collect();
    normalize(&mut trivial);

    // y = (M x + x) / 2
    let apply = |x: &[f64], y: &mut [f64]| {
        let sx: Vec<f64> = x.iter().zip(&scale).map(|(a, s)| a * s).collect();
        let mean = sx.iter().sum::<f64>() / n as f64;
        for i in 0..n {
            let adj: f64 = g.neighbors(i).iter().map(|&j| sx[j]).sum();
            y[i] = 0.5 * (scale[i] * (adj + mean) + x[i]);
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut basis: Vec<Vec<f64>> = (0..b)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    orthonormalize(&mut basis, &trivial);
    let mut previous = vec![f64::INFINITY; k];
    let mut image = vec![vec![0.0; n]; b];
    for iteration in 0..MAX_ITERATIONS {
        for (x, y) in basis.iter().zip(image.iter_mut()) {
            apply(x, y);
        }
        // Rayleigh-Ritz every few steps to watch convergence
        if iteration % 10 == 9 {
            let (values, _) = ritz(&basis, &image);
            let done = values.iter().zip(&previous).all(|(a, p)| (a - p).abs() < TOLERANCE);
            previous.copy_from_slice(&values[..k]);
            if done {
                break;
            }
        }
        std::mem::swap(&mut basis, &mut image);
        orthonormalize(&mut basis, &trivial);
    }
    for (x, y) in basis.iter().zip(image.iter_mut()) {
        apply(x, y);
    }
    let (values, vectors) = ritz(&basis, &image);
    Ok(values
        .into_iter()
        .zip(vectors)
        .take(k)
        // undo the shift
        .map(|(v, x)| (2.0 * v - 1.0, x))
        .collect())
}

/// Ritz values (descending) and vectors of the operator restricted to `basis`.
fn ritz(basis: &[Vec<f64>], image: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let b = basis.len();
    let h = DMatrix::from_fn(b, b, |p, q| {
        0.5 * (dot(&basis[p], &image[q]) + dot(&basis[q], &image[p]))
    });
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..b).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]));
    let n = basis[0].len();
    let vectors = order
        .iter()
        .map(|&c| {
            let mut v = vec![0.0; n];
            for (p, x) in basis.iter().enumerate() {
                let w = eig.eigenvectors[(p, c)];
                v.iter_mut().zip(x).for_each(|(a, xi)| *a += w * xi);
            }
            normalize(&mut v);
            v
        })
        .collect();
    (order.iter().map(|&c| eig.eigenvalues[c]).collect(), vectors)
}

/// Modified Gram-Schmidt against `fixed` and then each other. A vector that
/// collapses is replaced by a fresh deterministic direction.
fn orthonormalize(basis: &mut [Vec<f64>], fixed: &[f64]) {
    let n = fixed.len();
    for p in 0..basis.len() {
        for attempt in 0..3 {
            let (done, rest) = basis.split_at_mut(p);
            let v = &mut rest[0];
            let before = dot(v, v).sqrt();
            project_out(v, fixed);
            for q in done.iter() {
                project_out(v, q);
            }
            let after = dot(v, v).sqrt();
            if after > 1e-8 * before.max(f64::MIN_POSITIVE) {
                v.iter_mut().for_each(|a| *a /= after);
                break;
            }
            // rank collapse: restart this direction
            let mut rng = ChaCha8Rng::seed_from_u64((p * 3 + attempt) as u64);
            *v = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        }
    }
}

fn project_out(v: &mut [f64], u: &[f64]) {
    let c = dot(v, u);
    v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|a| *a /= norm);
    }
}

/// Planar coordinates from the two leading nontrivial eigenvectors, mapped
/// back by `D^-½` (random-walk normalization). Needs at least 3 nodes.
pub fn spectral_layout(g: &Graph) -> Result<Vec<[f64; 2]>> {
    if g.n() < 3 {
        return Err(Error::domain("spectral layout needs at least 3 nodes"));
    }
    let pairs = leading_eigenpairs(g, 2)?;
    let (u, v) = (&pairs[0].1, &pairs[1].1);
    Ok((0..g.n())
        .map(|i| {
            let s = ((g.degree(i) + 1) as f64).sqrt().recip();
            [u[i] * s, v[i] * s]
        })
        .collect())
}
