//! Tree-likeness metrics.
//!
//! Conventions on disconnected graphs:
//! - mean path length averages over ordered reachable pairs only (0 without any);
//! - closeness uses the reachable-set correction `(n_r/(N−1))·(n_r/Σd)`, which
//!   is `(N−1)/Σd` on connected graphs and 0 for isolated nodes;
//! - eigenvector centrality is computed on the largest component (ties broken
//!   by smallest member id) and is zero elsewhere.
//!
//! Betweenness counts each unordered pair `{s, t}` once and divides by
//! `(N−1)(N−2)`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::modularity::modularity_greedy;
use super::Graph;

/// Connected components, each sorted, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; g.n()];
    let mut comps = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..g.n() {
        if label[start] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![start];
        label[start] = id;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = id;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}

/// `m − N + k`.
pub fn circuit_rank(g: &Graph) -> usize {
    g.m() + connected_components(g).len() - g.n()
}

pub fn triangle_count(g: &Graph) -> u64 {
    let mut count = 0u64;
    for &(a, b) in g.edges() {
        // common neighbors c > b close each triangle exactly once
        let (na, nb) = (g.neighbors(a), g.neighbors(b));
        let (mut i, mut j) = (na.partition_point(|&x| x <= b), nb.partition_point(|&x| x <= b));
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    count
}

fn connected_triples(g: &Graph) -> u64 {
    (0..g.n())
        .map(|i| {
            let k = g.degree(i) as u64;
            k * k.saturating_sub(1) / 2
        })
        .sum()
}

/// `3 × triangles / connected triples`, 0 when there are no triples.
pub fn global_clustering(g: &Graph) -> f64 {
    let triples = connected_triples(g);
    if triples == 0 {
        0.0
    } else {
        3.0 * triangle_count(g) as f64 / triples as f64
    }
}

/// Output of one breadth-first sweep over all sources.
struct AllPairs {
    betweenness: Vec<f64>,
    distance_sum: Vec<u64>,
    reachable: Vec<usize>,
}

fn all_pairs_sweep(g: &Graph) -> AllPairs {
    let n = g.n();
    let mut bc = vec![0.0; n];
    let mut distance_sum = vec![0u64; n];
    let mut reachable = vec![0usize; n];

    let mut dist = vec![u32::MAX; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        order.clear();
        dist.fill(u32::MAX);
        sigma.fill(0.0);
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        reachable[s] = order.len() - 1;
        distance_sum[s] = order.iter().map(|&v| dist[v] as u64).sum();

        for &v in &order {
            delta[v] = 0.0;
        }
        for &w in order.iter().rev() {
            for &v in g.neighbors(w) {
                if dist[v] != u32::MAX && dist[v] + 1 == dist[w] {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    // every unordered pair was visited from both endpoints
    for b in &mut bc {
        *b *= 0.5;
    }
    AllPairs {
        betweenness: bc,
        distance_sum,
        reachable,
    }
}

fn normalized_betweenness(g: &Graph, raw: &[f64]) -> Vec<f64> {
    let n = g.n();
    if n < 3 {
        return vec![0.0; n];
    }
    let scale = ((n - 1) * (n - 2)) as f64;
    raw.iter().map(|b| b / scale).collect()
}

pub fn betweenness_scores(g: &Graph) -> Vec<f64> {
    normalized_betweenness(g, &all_pairs_sweep(g).betweenness)
}

pub fn betweenness_mean(g: &Graph) -> f64 {
    mean(&betweenness_scores(g))
}

fn closeness_from(g: &Graph, sweep: &AllPairs) -> Vec<f64> {
    let n = g.n();
    (0..n)
        .map(|i| {
            let reach = sweep.reachable[i] as f64;
            let total = sweep.distance_sum[i] as f64;
            if total == 0.0 {
                0.0
            } else {
                (reach / (n - 1) as f64) * (reach / total)
            }
        })
        .collect()
}

pub fn closeness_scores(g: &Graph) -> Vec<f64> {
    closeness_from(g, &all_pairs_sweep(g))
}

pub fn closeness_mean(g: &Graph) -> f64 {
    mean(&closeness_scores(g))
}

fn path_length_from(sweep: &AllPairs) -> f64 {
    let pairs: usize = sweep.reachable.iter().sum();
    if pairs == 0 {
        0.0
    } else {
        sweep.distance_sum.iter().sum::<u64>() as f64 / pairs as f64
    }
}

pub fn mean_path_length(g: &Graph) -> f64 {
    path_length_from(&all_pairs_sweep(g))
}

const EIGEN_TOL: f64 = 1e-10;
const EIGEN_MAX_ITER: usize = 10_000;

/// Leading adjacency eigenvector on the largest component, unit ℓ₂ norm,
/// nonnegative, zero outside that component.
pub fn eigenvector_scores(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut scores = vec![0.0; n];
    let comps = connected_components(g);
    let Some(largest) = comps.iter().reduce(|best, c| if c.len() > best.len() { c } else { best }) else {
        return scores;
    };
    if largest.len() < 2 {
        return scores;
    }
    let mut local = vec![usize::MAX; n];
    for (k, &v) in largest.iter().enumerate() {
        local[v] = k;
    }
    let size = largest.len();
    let mut x = vec![1.0 / (size as f64).sqrt(); size];
    let mut next = vec![0.0; size];
    // (A + I) shares eigenvectors with A and breaks the ±λ tie on bipartite graphs
    for _ in 0..EIGEN_MAX_ITER {
        for (k, &v) in largest.iter().enumerate() {
            next[k] = x[k] + g.neighbors(v).iter().map(|&w| x[local[w]]).sum::<f64>();
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut change = 0.0f64;
        for k in 0..size {
            let v = next[k] / norm;
            change = change.max((v - x[k]).abs());
            x[k] = v;
        }
        if change < EIGEN_TOL {
            break;
        }
    }
    for (k, &v) in largest.iter().enumerate() {
        scores[v] = x[k].abs();
    }
    scores
}

pub fn eigenvector_mean(g: &Graph) -> f64 {
    mean(&eigenvector_scores(g))
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

/// Column order of the metrics CSV.
pub const PANEL_COLUMNS: [&str; 10] = [
    "n",
    "m",
    "density",
    "circuit_rank",
    "clustering",
    "mean_betweenness",
    "mean_closeness",
    "mean_eigenvector",
    "mean_path_length",
    "modularity",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricPanel {
    pub n: usize,
    pub m: usize,
    pub edge_density: f64,
    pub components: usize,
    pub circuit_rank: usize,
    pub triangles: u64,
    pub clustering: f64,
    pub mean_betweenness: f64,
    pub mean_closeness: f64,
    pub mean_eigenvector: f64,
    pub mean_path_length: f64,
    pub modularity: f64,
}

impl MetricPanel {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.edge_density,
            self.circuit_rank,
            self.clustering,
            self.mean_betweenness,
            self.mean_closeness,
            self.mean_eigenvector,
            self.mean_path_length,
            self.modularity
        )
    }
}

pub fn metric_panel(g: &Graph) -> MetricPanel {
    let components = connected_components(g).len();
    let sweep = all_pairs_sweep(g);
    let triangles = triangle_count(g);
    let triples = connected_triples(g);
    MetricPanel {
        n: g.n(),
        m: g.m(),
        edge_density: g.density(),
        components,
        circuit_rank: g.m() + components - g.n(),
        triangles,
        clustering: if triples == 0 {
            0.0
        } else {
            3.0 * triangles as f64 / triples as f64
        },
        mean_betweenness: mean(&normalized_betweenness(g, &sweep.betweenness)),
        mean_closeness: mean(&closeness_from(g, &sweep)),
        mean_eigenvector: eigenvector_mean(g),
        mean_path_length: path_length_from(&sweep),
        modularity: modularity_greedy(g).0,
    }
}
