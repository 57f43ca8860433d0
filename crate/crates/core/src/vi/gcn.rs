//! Two-layer graph-convolution encoder on one-hot node features.
//!
//! Layer 1 is `ReLU(Â·W₁)` (the identity features make `X·W₁ = W₁`), layer 2
//! is `Â·H·W₂` with four linear output columns per node:
//! `μ_r, log σ_r, μ_θ, log σ_θ`. `Â = D̃^{-1/2}(Y + I)D̃^{-1/2}` is kept in
//! compressed sparse rows, so a forward pass costs `O((N + M)·hidden)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Output columns of the second layer.
pub const HEADS: usize = 4;
pub const MU_R: usize = 0;
pub const LOG_SIGMA_R: usize = 1;
pub const MU_THETA: usize = 2;
pub const LOG_SIGMA_THETA: usize = 3;

pub const SIGMA_MIN: f64 = 1e-4;
pub const SIGMA_MAX: f64 = 10.0;

/// Symmetrically normalized adjacency with self-loops, in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl NormalizedAdjacency {
    pub fn new(g: &Graph) -> Self {
        let n = g.n();
        let scale: Vec<f64> = (0..n).map(|i| 1.0 / ((g.degree(i) + 1) as f64).sqrt()).collect();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::with_capacity(n + 2 * g.m());
        let mut vals = Vec::with_capacity(n + 2 * g.m());
        row_ptr.push(0);
        for i in 0..n {
            let mut self_done = false;
            for &j in g.neighbors(i) {
                if !self_done && j > i {
                    cols.push(i);
                    vals.push(scale[i] * scale[i]);
                    self_done = true;
                }
                cols.push(j);
                vals.push(scale[i] * scale[j]);
            }
            if !self_done {
                cols.push(i);
                vals.push(scale[i] * scale[i]);
            }
            row_ptr.push(cols.len());
        }
        NormalizedAdjacency { n, row_ptr, cols, vals }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `Â·B` for a row-major `N × k` matrix `B`.
    pub fn multiply(&self, b: &[f64], k: usize) -> Vec<f64> {
        debug_assert_eq!(b.len(), self.n * k);
        let mut out = vec![0.0; self.n * k];
        for i in 0..self.n {
            let row = &mut out[i * k..(i + 1) * k];
            for e in self.row_ptr[i]..self.row_ptr[i + 1] {
                let (j, w) = (self.cols[e], self.vals[e]);
                for (o, &v) in row.iter_mut().zip(&b[j * k..(j + 1) * k]) {
                    *o += w * v;
                }
            }
        }
        out
    }
}

/// Encoder weights. `w1` is `input_dim × hidden`, `w2` is `hidden × 4`, both
/// row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderWeights {
    pub input_dim: usize,
    pub hidden: usize,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
}

impl EncoderWeights {
    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        EncoderWeights {
            input_dim,
            hidden,
            w1: vec![0.0; input_dim * hidden],
            w2: vec![0.0; hidden * HEADS],
        }
    }

    /// Glorot-uniform initialization.
    pub fn glorot<R: Rng + ?Sized>(input_dim: usize, hidden: usize, rng: &mut R) -> Self {
        let mut w = Self::zeros(input_dim, hidden);
        let a1 = (6.0 / (input_dim + hidden) as f64).sqrt();
        w.w1.iter_mut().for_each(|v| *v = rng.random_range(-a1..a1));
        let a2 = (6.0 / (hidden + HEADS) as f64).sqrt();
        w.w2.iter_mut().for_each(|v| *v = rng.random_range(-a2..a2));
        w
    }

    pub fn len(&self) -> usize {
        self.w1.len() + self.w2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.w1.len() != self.input_dim * self.hidden || self.w2.len() != self.hidden * HEADS {
            return Err(Error::Config(format!(
                "encoder weight shapes do not match input_dim={} hidden={}",
                self.input_dim, self.hidden
            )));
        }
        if self.w1.iter().chain(&self.w2).any(|v| !v.is_finite()) {
            return Err(Error::numerical("encoder", "non-finite weight"));
        }
        Ok(())
    }

    /// Relabels node features so that old node `i` becomes `perm[i]`.
    pub fn permute_inputs(&self, perm: &[usize]) -> Self {
        let h = self.hidden;
        let mut w1 = vec![0.0; self.w1.len()];
        for (i, &p) in perm.iter().enumerate() {
            w1[p * h..(p + 1) * h].copy_from_slice(&self.w1[i * h..(i + 1) * h]);
        }
        EncoderWeights { w1, ..self.clone() }
    }
}

/// Per-node variational parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeGaussians {
    pub mu_r: Vec<f64>,
    pub sigma_r: Vec<f64>,
    pub mu_theta: Vec<f64>,
    pub sigma_theta: Vec<f64>,
}

impl NodeGaussians {
    pub fn n(&self) -> usize {
        self.mu_r.len()
    }
}

/// Forward-pass intermediates kept for backpropagation.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub gaussians: NodeGaussians,
    pre1: Vec<f64>,
    h1: Vec<f64>,
    /// Raw log-σ head values, before clamping.
    raw_log_sigma: [Vec<f64>; 2],
}

fn clamped_sigma(raw: f64) -> f64 {
    raw.exp().clamp(SIGMA_MIN, SIGMA_MAX)
}

/// Runs the encoder.
pub fn gcn_encode(adj: &NormalizedAdjacency, w: &EncoderWeights) -> Result<Encoded> {
    let n = adj.n();
    if w.input_dim != n {
        return Err(Error::Config(format!(
            "encoder expects {} nodes, graph has {n}",
            w.input_dim
        )));
    }
    w.validate()?;
    let h = w.hidden;
    let pre1 = adj.multiply(&w.w1, h);
    let h1: Vec<f64> = pre1.iter().map(|&v| v.max(0.0)).collect();
    let mut hw = vec![0.0; n * HEADS];
    for i in 0..n {
        let row = &h1[i * h..(i + 1) * h];
        let out = &mut hw[i * HEADS..(i + 1) * HEADS];
        for (k, &v) in row.iter().enumerate() {
            if v != 0.0 {
                for (o, &wk) in out.iter_mut().zip(&w.w2[k * HEADS..(k + 1) * HEADS]) {
                    *o += v * wk;
                }
            }
        }
    }
    let o = adj.multiply(&hw, HEADS);
    let col = |c: usize| -> Vec<f64> { (0..n).map(|i| o[i * HEADS + c]).collect() };
    let raw_r = col(LOG_SIGMA_R);
    let raw_t = col(LOG_SIGMA_THETA);
    Ok(Encoded {
        gaussians: NodeGaussians {
            mu_r: col(MU_R),
            sigma_r: raw_r.iter().map(|&v| clamped_sigma(v)).collect(),
            mu_theta: col(MU_THETA),
            sigma_theta: raw_t.iter().map(|&v| clamped_sigma(v)).collect(),
        },
        pre1,
        h1,
        raw_log_sigma: [raw_r, raw_t],
    })
}

/// Gradient of a scalar with respect to the per-node Gaussian parameters,
/// with `σ` derivatives taken with respect to `σ` itself.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeGradients {
    pub mu_r: Vec<f64>,
    pub sigma_r: Vec<f64>,
    pub mu_theta: Vec<f64>,
    pub sigma_theta: Vec<f64>,
}

impl NodeGradients {
    pub fn zeros(n: usize) -> Self {
        NodeGradients {
            mu_r: vec![0.0; n],
            sigma_r: vec![0.0; n],
            mu_theta: vec![0.0; n],
            sigma_theta: vec![0.0; n],
        }
    }
}

/// Backpropagates node-level gradients to the encoder weights.
pub fn gcn_backward(adj: &NormalizedAdjacency, w: &EncoderWeights, enc: &Encoded, grad: &NodeGradients) -> EncoderWeights {
    let n = adj.n();
    let h = w.hidden;
    let g = &enc.gaussians;
    // dσ/draw = σ inside the clamp, 0 outside
    let through = |raw: f64, sigma: f64, d: f64| -> f64 {
        let e = raw.exp();
        if (SIGMA_MIN..=SIGMA_MAX).contains(&e) {
            d * sigma
        } else {
            0.0
        }
    };
    let mut d_o = vec![0.0; n * HEADS];
    for i in 0..n {
        d_o[i * HEADS + MU_R] = grad.mu_r[i];
        d_o[i * HEADS + LOG_SIGMA_R] = through(enc.raw_log_sigma[0][i], g.sigma_r[i], grad.sigma_r[i]);
        d_o[i * HEADS + MU_THETA] = grad.mu_theta[i];
        d_o[i * HEADS + LOG_SIGMA_THETA] = through(enc.raw_log_sigma[1][i], g.sigma_theta[i], grad.sigma_theta[i]);
    }
    let a_do = adj.multiply(&d_o, HEADS);
    let mut out = EncoderWeights::zeros(w.input_dim, h);
    let mut d_pre1 = vec![0.0; n * h];
    for i in 0..n {
        let gi = &a_do[i * HEADS..(i + 1) * HEADS];
        for k in 0..h {
            let hv = enc.h1[i * h + k];
            let w2k = &w.w2[k * HEADS..(k + 1) * HEADS];
            if hv != 0.0 {
                for (o, &g) in out.w2[k * HEADS..(k + 1) * HEADS].iter_mut().zip(gi) {
                    *o += hv * g;
                }
            }
            if enc.pre1[i * h + k] > 0.0 {
                d_pre1[i * h + k] = (0..HEADS).map(|c| gi[c] * w2k[c]).sum();
            }
        }
    }
    out.w1 = adj.multiply(&d_pre1, h);
    out
}
