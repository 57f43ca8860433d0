use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::draws::PosteriorDraws;

/// Effective sample size of a scalar trace using Geyer's initial monotone
/// sequence estimator.
pub fn effective_sample_size(trace: &[f64]) -> f64 {
    let n = trace.len();
    if n < 4 {
        return n as f64;
    }
    let mean = trace.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = trace.iter().map(|v| v - mean).collect();
    let var = centered.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if var <= 0.0 {
        return n as f64;
    }
    let autocorr = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / (n as f64 * var)
    };
    let mut sum = 0.0;
    let mut prev_pair = f64::INFINITY;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = autocorr(lag) + autocorr(lag + 1);
        if pair <= 0.0 {
            break;
        }
        let pair = pair.min(prev_pair);
        sum += pair;
        prev_pair = pair;
        lag += 2;
    }
    // Σ pairs = 1 + 2 Σ_{t≥1} ρ_t + ρ_0, with ρ_0 = 1
    let tau = 2.0 * sum - 1.0;
    (n as f64 / tau.max(1e-12)).min(n as f64 * (n as f64).log10().max(1.0))
}

/// Split-R̂ of one chain: the trace's two halves are treated as chains.
pub fn split_rhat(trace: &[f64]) -> f64 {
    let half = trace.len() / 2;
    if half < 2 {
        return f64::NAN;
    }
    let chains = [&trace[..half], &trace[trace.len() - half..]];
    let means: Vec<f64> = chains.iter().map(|c| c.iter().sum::<f64>() / half as f64).collect();
    let vars: Vec<f64> = chains
        .iter()
        .zip(&means)
        .map(|(c, m)| c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (half - 1) as f64)
        .collect();
    let grand = (means[0] + means[1]) / 2.0;
    let between = half as f64 * means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let within = (vars[0] + vars[1]) / 2.0;
    if within <= 0.0 {
        return if between <= 0.0 { 1.0 } else { f64::INFINITY };
    }
    let var_plus = (half as f64 - 1.0) / half as f64 * within + between / half as f64;
    (var_plus / within).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub draws: usize,
    pub acceptance_rate: f64,
    pub divergence_count: usize,
    pub warmup_divergences: usize,
    pub step_size: f64,
    pub effective_sample_size: BTreeMap<String, f64>,
    pub split_rhat: BTreeMap<String, f64>,
    pub failure: Option<String>,
}

impl Diagnostics {
    pub fn from_draws(d: &PosteriorDraws) -> Self {
        let mut traces = vec![("R", d.radius_trace()), ("alpha", d.alpha_trace())];
        if d.fixed_temperature.is_none() {
            traces.push(("T", d.temperature_trace()));
        }
        Diagnostics {
            draws: d.draws.len(),
            acceptance_rate: d.acceptance_rate,
            divergence_count: d.divergence_count,
            warmup_divergences: d.warmup_divergences,
            step_size: d.step_size,
            effective_sample_size: traces
                .iter()
                .map(|(k, t)| (k.to_string(), effective_sample_size(t)))
                .collect(),
            split_rhat: traces.iter().map(|(k, t)| (k.to_string(), split_rhat(t))).collect(),
            failure: d.failure.clone(),
        }
    }
}
