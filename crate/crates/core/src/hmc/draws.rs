use std::io::Write;

use serde::{Deserialize, Serialize};

use super::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::eval::PairMatrix;
use crate::generative::{link_logit, logistic, ModelParams};
use crate::geometry::{pair_distance, NodeTrig, PolarPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub params: ModelParams,
    pub positions: Vec<PolarPoint>,
}

impl Draw {
    fn trig(&self) -> Vec<NodeTrig> {
        self.positions.iter().map(|p| NodeTrig::new(p.r(), p.theta())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub draws: Vec<Draw>,
    pub acceptance_rate: f64,
    pub divergence_count: usize,
    pub warmup_divergences: usize,
    pub step_size: f64,
    pub fixed_temperature: Option<f64>,
    /// Set when warmup diverged persistently; draws are kept but suspect.
    pub failure: Option<String>,
}

impl PosteriorDraws {
    pub fn n(&self) -> usize {
        self.draws.first().map_or(0, |d| d.positions.len())
    }

    pub fn radius_trace(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.params.radius).collect()
    }

    pub fn alpha_trace(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.params.alpha).collect()
    }

    pub fn temperature_trace(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.params.temperature).collect()
    }

    pub fn posterior_mean_params(&self) -> Option<ModelParams> {
        let k = self.draws.len() as f64;
        (!self.draws.is_empty()).then(|| ModelParams {
            radius: self.radius_trace().iter().sum::<f64>() / k,
            alpha: self.alpha_trace().iter().sum::<f64>() / k,
            temperature: self.temperature_trace().iter().sum::<f64>() / k,
        })
    }

    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics::from_draws(self)
    }

    /// `iter,R,alpha,T`, one row per stored draw.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "iter,R,alpha,T")?;
        for (k, d) in self.draws.iter().enumerate() {
            writeln!(
                out,
                "{k},{},{},{}",
                d.params.radius, d.params.alpha, d.params.temperature
            )?;
        }
        out.flush()?;
        Ok(())
    }

    /// Position draws as little-endian f64: for each draw, for each node,
    /// `r` then `θ`. No header; shape is `draws × N × 2`.
    pub fn write_positions_blob<W: Write>(&self, mut out: W) -> Result<()> {
        for d in &self.draws {
            for p in &d.positions {
                out.write_all(&p.r().to_le_bytes())?;
                out.write_all(&p.theta().to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Posterior mean of every pairwise geodesic distance.
pub fn posterior_distance_summary(draws: &PosteriorDraws) -> Result<PairMatrix> {
    summarize(draws, |d, _| d)
}

/// Posterior mean edge probability of every pair.
pub fn posterior_probability_summary(draws: &PosteriorDraws) -> Result<PairMatrix> {
    summarize(draws, |d, params| logistic(link_logit(d, params.alpha, params.temperature)))
}

fn summarize<F>(draws: &PosteriorDraws, f: F) -> Result<PairMatrix>
where
    F: Fn(f64, &ModelParams) -> f64,
{
    if draws.draws.is_empty() {
        return Err(Error::Undefined("no posterior draws to summarize".into()));
    }
    let n = draws.n();
    let mut acc = vec![0.0; n * n.saturating_sub(1) / 2];
    for d in &draws.draws {
        let trig = d.trig();
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                acc[k] += f(pair_distance(&trig[i], &trig[j]), &d.params);
                k += 1;
            }
        }
    }
    let scale = 1.0 / draws.draws.len() as f64;
    for v in &mut acc {
        *v *= scale;
    }
    PairMatrix::new(n, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hyperbolic_distance_stable;

    fn sample_draws() -> PosteriorDraws {
        let mk = |r: f64, pts: &[(f64, f64)]| Draw {
            params: ModelParams::new(r, r, 0.1).unwrap(),
            positions: pts.iter().map(|&(a, b)| PolarPoint::new(a, b).unwrap()).collect(),
        };
        PosteriorDraws {
            draws: vec![
                mk(3.0, &[(1.0, 0.0), (2.0, 1.0), (0.5, 3.0)]),
                mk(4.0, &[(1.5, 0.2), (2.5, 1.1), (0.1, 2.0)]),
            ],
            acceptance_rate: 0.8,
            divergence_count: 0,
            warmup_divergences: 0,
            step_size: 0.1,
            fixed_temperature: None,
            failure: None,
        }
    }

    #[test]
    fn single_draw_summary_is_exact() {
        let mut d = sample_draws();
        d.draws.truncate(1);
        let s = posterior_distance_summary(&d).unwrap();
        let p = &d.draws[0].positions;
        for i in 0..3 {
            assert_eq!(s.get(i, i), 0.0);
            for j in 0..3 {
                if i != j {
                    let exact = hyperbolic_distance_stable(p[i], p[j]);
                    assert!((s.get(i, j) - exact).abs() < 1e-12);
                    assert_eq!(s.get(i, j), s.get(j, i));
                }
            }
        }
    }

    #[test]
    fn exports() {
        let d = sample_draws();
        let mut csv = Vec::new();
        d.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().next().unwrap(), "iter,R,alpha,T");
        assert_eq!(text.lines().count(), 3);
        let mut blob = Vec::new();
        d.write_positions_blob(&mut blob).unwrap();
        assert_eq!(blob.len(), 2 * 3 * 2 * 8);
        assert_eq!(f64::from_le_bytes(blob[16..24].try_into().unwrap()), 2.0);
        let empty = PosteriorDraws { draws: vec![], ..d };
        assert!(posterior_distance_summary(&empty).is_err());
    }
}
