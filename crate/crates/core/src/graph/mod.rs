//! Undirected simple graphs and the structural metric panel.

mod io;
mod metrics;
mod modularity;
mod spectral;

pub use io::{read_edge_list, write_edge_list};
pub use metrics::{
    betweenness_mean, betweenness_scores, circuit_rank, closeness_mean, closeness_scores,
    connected_components, eigenvector_mean, eigenvector_scores, global_clustering,
    mean_path_length, metric_panel, triangle_count, MetricPanel, PANEL_COLUMNS,
};
pub use modularity::{modularity, modularity_greedy, Communities};
pub use spectral::spectral_layout;

use crate::error::{Error, Result};

/// Undirected graph without self-loops or multi-edges.
///
/// Edges are kept as a sorted list of `(i, j)` pairs with `i < j`, alongside
/// sorted neighbor lists. The two views are built together and never diverge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            neighbors: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from unordered pairs. Duplicates collapse; self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::domain(format!("self-loop at node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::domain(format!("edge ({a}, {b}) out of range for {n} nodes")));
            }
            list.push((a.min(b), a.max(b)));
        }
        Ok(Self::from_canonical(n, list))
    }

    fn from_canonical(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Graph { n, edges, neighbors }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && i < self.n && j < self.n && self.neighbors[i].binary_search(&j).is_ok()
    }

    /// Number of unordered node pairs.
    pub fn pair_count(&self) -> usize {
        self.n * self.n.saturating_sub(1) / 2
    }

    pub fn density(&self) -> f64 {
        match self.pair_count() {
            0 => 0.0,
            pairs => self.m() as f64 / pairs as f64,
        }
    }

    /// Dense symmetric 0/1 adjacency matrix with zero diagonal, row-major.
    pub fn adjacency_matrix(&self) -> Vec<Vec<u8>> {
        let mut adj = vec![vec![0u8; self.n]; self.n];
        for &(a, b) in &self.edges {
            adj[a][b] = 1;
            adj[b][a] = 1;
        }
        adj
    }

    /// Edge indicator over the strict upper triangle in row-major pair order.
    pub fn upper_triangle_indicator(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.pair_count());
        for i in 0..self.n {
            let nb = &self.neighbors[i];
            let mut k = nb.partition_point(|&j| j <= i);
            for j in (i + 1)..self.n {
                let hit = k < nb.len() && nb[k] == j;
                if hit {
                    k += 1;
                }
                out.push(hit);
            }
        }
        out
    }

    /// Relabels nodes so that old node `i` becomes `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::domain("permutation length must equal node count"));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::domain("not a permutation"));
            }
        }
        let edges = self.edges.iter().map(|&(a, b)| (perm[a], perm[b]));
        Graph::from_edges(self.n, edges)
    }
}

/// Row-major index of pair `(i, j)`, `i < j`, in the strict upper triangle.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}
