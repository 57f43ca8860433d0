//! Reconstruction scoring: AUC, accuracy, distance-recovery correlations and
//! the paired model-comparison summary.
//!
//! All scores are over unordered pairs `i < j` and the evaluation is in-sample.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Symmetric pair matrix with zero diagonal, stored as its strict upper
/// triangle in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairMatrix {
    n: usize,
    values: Vec<f64>,
}

impl PairMatrix {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Config(format!(
                "{} values do not fill the upper triangle of a {n}-node matrix",
                values.len()
            )));
        }
        Ok(PairMatrix { n, values })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut values = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                values.push(f(i, j));
            }
        }
        PairMatrix { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            let (a, b) = (i.min(j), i.max(j));
            self.values[crate::graph::pair_index(self.n, a, b)]
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        PairMatrix {
            n: self.n,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Relabels so that old node `i` becomes `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut inverse = vec![0; self.n];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        PairMatrix::from_fn(self.n, |a, b| self.get(inverse[a], inverse[b]))
    }
}

/// Midranks (1-based) of `values`; ties share their average rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = 0.5 * ((start + 1) + end) as f64;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

fn check_size(scores: &PairMatrix, truth: &Graph) -> Result<()> {
    if scores.n() != truth.n() {
        return Err(Error::Config(format!(
            "score matrix has {} nodes, graph has {}",
            scores.n(),
            truth.n()
        )));
    }
    Ok(())
}

/// Rank-based (Mann–Whitney) area under the ROC curve of edges against
/// non-edges.
pub fn auc(scores: &PairMatrix, truth: &Graph) -> Result<f64> {
    check_size(scores, truth)?;
    let labels = truth.upper_triangle_indicator();
    let positives = labels.iter().filter(|&&y| y).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::Undefined(
            "AUC needs at least one edge and one non-edge".into(),
        ));
    }
    let ranks = midranks(scores.values());
    let rank_sum: f64 = ranks.iter().zip(&labels).filter(|(_, &y)| y).map(|(r, _)| r).sum();
    let p = positives as f64;
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * negatives as f64))
}

/// Fraction of pairs where `score ≥ threshold` agrees with the edge indicator.
pub fn accuracy(scores: &PairMatrix, truth: &Graph, threshold: f64) -> Result<f64> {
    check_size(scores, truth)?;
    let labels = truth.upper_triangle_indicator();
    if labels.is_empty() {
        return Err(Error::Undefined("accuracy needs at least one pair".into()));
    }
    let hits = scores
        .values()
        .iter()
        .zip(&labels)
        .filter(|(&s, &y)| (s >= threshold) == y)
        .count();
    Ok(hits as f64 / labels.len() as f64)
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    sxy / (sxx * syy).sqrt()
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&midranks(x), &midranks(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlations {
    pub pearson: f64,
    pub spearman: f64,
}

/// Pearson and Spearman correlation over the strict upper triangle.
pub fn distance_correlations(true_d: &PairMatrix, inferred_d: &PairMatrix) -> Result<Correlations> {
    if true_d.n() != inferred_d.n() {
        return Err(Error::Config("distance matrices differ in size".into()));
    }
    if true_d.values().len() < 2 {
        return Err(Error::Undefined("correlation needs at least two pairs".into()));
    }
    Ok(Correlations {
        pearson: pearson(true_d.values(), inferred_d.values()),
        spearman: spearman(true_d.values(), inferred_d.values()),
    })
}

/// Per-run evaluation record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub auc: f64,
    pub accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pearson: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spearman: Option<f64>,
}

/// One fitted model on one replicate of one simulation cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub n: usize,
    pub radius: f64,
    pub replicate: usize,
    pub model: String,
    pub auc: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub max: f64,
    pub prop_best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub n: usize,
    pub radius: f64,
    pub model: String,
    pub replicates: usize,
    pub auc: MetricSummary,
    pub accuracy: MetricSummary,
}

pub const COMPARISON_COLUMNS: &str =
    "N,R,model,replicates,auc_mean,auc_max,auc_prop_best,accuracy_mean,accuracy_max,accuracy_prop_best";

impl ComparisonSummary {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.radius,
            self.model,
            self.replicates,
            self.auc.mean,
            self.auc.max,
            self.auc.prop_best,
            self.accuracy.mean,
            self.accuracy.max,
            self.accuracy.prop_best
        )
    }
}

/// Average, maximum and proportion-best per `(N, R, model)`.
///
/// A replicate counts as "best" for every model tied at the top.
pub fn paired_comparison(records: &[ComparisonRecord]) -> Vec<ComparisonSummary> {
    type Cell = (usize, u64);
    let cell_of = |r: &ComparisonRecord| -> Cell { (r.n, r.radius.to_bits()) };

    let mut best: BTreeMap<(Cell, usize), (f64, f64)> = BTreeMap::new();
    for r in records {
        let e = best
            .entry((cell_of(r), r.replicate))
            .or_insert((f64::NEG_INFINITY, f64::NEG_INFINITY));
        e.0 = e.0.max(r.auc);
        e.1 = e.1.max(r.accuracy);
    }

    #[derive(Default)]
    struct Acc {
        count: usize,
        auc_sum: f64,
        auc_max: f64,
        auc_best: usize,
        acc_sum: f64,
        acc_max: f64,
        acc_best: usize,
        radius: f64,
    }
    let mut groups: BTreeMap<(Cell, String), Acc> = BTreeMap::new();
    for r in records {
        let (top_auc, top_acc) = best[&(cell_of(r), r.replicate)];
        let a = groups.entry((cell_of(r), r.model.clone())).or_insert_with(|| Acc {
            auc_max: f64::NEG_INFINITY,
            acc_max: f64::NEG_INFINITY,
            ..Acc::default()
        });
        a.radius = r.radius;
        a.count += 1;
        a.auc_sum += r.auc;
        a.acc_sum += r.accuracy;
        a.auc_max = a.auc_max.max(r.auc);
        a.acc_max = a.acc_max.max(r.accuracy);
        a.auc_best += usize::from(r.auc == top_auc);
        a.acc_best += usize::from(r.accuracy == top_acc);
    }
    groups
        .into_iter()
        .map(|(((n, _), model), a)| {
            let k = a.count as f64;
            ComparisonSummary {
                n,
                radius: a.radius,
                model,
                replicates: a.count,
                auc: MetricSummary {
                    mean: a.auc_sum / k,
                    max: a.auc_max,
                    prop_best: a.auc_best as f64 / k,
                },
                accuracy: MetricSummary {
                    mean: a.acc_sum / k,
                    max: a.acc_max,
                    prop_best: a.acc_best as f64 / k,
                },
            }
        })
        .collect()
}
