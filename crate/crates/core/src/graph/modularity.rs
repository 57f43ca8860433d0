//! Greedy agglomerative modularity maximization (Clauset–Newman–Moore).
//!
//! Pairwise gains live in per-community sorted maps; a max-heap holds
//! candidate merges and is invalidated lazily. Equal gains merge the pair with
//! the lowest community ids first.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use super::Graph;

/// A node partition: sorted groups ordered by smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Communities {
    pub groups: Vec<Vec<usize>>,
}

impl Communities {
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (node, &l) in labels.iter().enumerate() {
            by_label.entry(l).or_default().push(node);
        }
        let mut groups: Vec<Vec<usize>> = by_label.into_values().collect();
        groups.sort_by_key(|g| g[0]);
        Communities { groups }
    }

    pub fn labels(&self, n: usize) -> Vec<usize> {
        let mut labels = vec![0; n];
        for (c, group) in self.groups.iter().enumerate() {
            for &v in group {
                labels[v] = c;
            }
        }
        labels
    }
}

/// Modularity of a labelled partition,
/// `Σ_c [L_c/m − (D_c/2m)²]`, or 0 for an edgeless graph.
pub fn modularity(g: &Graph, labels: &[usize]) -> f64 {
    let m = g.m() as f64;
    if g.m() == 0 {
        return 0.0;
    }
    let k = labels.iter().copied().max().map_or(0, |l| l + 1);
    let mut internal = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for &(a, b) in g.edges() {
        if labels[a] == labels[b] {
            internal[labels[a]] += 1.0;
        }
    }
    for v in 0..g.n() {
        degree[labels[v]] += g.degree(v) as f64;
    }
    internal
        .iter()
        .zip(&degree)
        .map(|(l, d)| l / m - (d / (2.0 * m)).powi(2))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Gain(f64);

impl Eq for Gain {}

impl PartialOrd for Gain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gain {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

type Candidate = (Gain, Reverse<(usize, usize)>);

/// Runs the greedy merge to exhaustion and returns the best partition seen
/// together with its modularity.
pub fn modularity_greedy(g: &Graph) -> (f64, Communities) {
    let n = g.n();
    let singletons = Communities::from_labels(&(0..n).collect::<Vec<_>>());
    if g.m() == 0 {
        return (0.0, singletons);
    }
    let two_m = 2.0 * g.m() as f64;
    let mut share: Vec<f64> = (0..n).map(|v| g.degree(v) as f64 / two_m).collect();
    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    let mut heap: BinaryHeap<Candidate> = BinaryHeap::new();
    for &(a, b) in g.edges() {
        let gain = 2.0 * (1.0 / two_m - share[a] * share[b]);
        rows[a].insert(b, gain);
        rows[b].insert(a, gain);
        heap.push((Gain(gain), Reverse((a, b))));
    }

    let mut alive = vec![true; n];
    let mut members: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut q: f64 = -share.iter().map(|a| a * a).sum::<f64>();
    let mut best_q = q;
    let mut best_labels: Vec<usize> = (0..n).collect();
    let mut label: Vec<usize> = (0..n).collect();

    while let Some((Gain(gain), Reverse((i, j)))) = heap.pop() {
        if !(alive[i] && alive[j]) || rows[i].get(&j).map(|v| v.to_bits()) != Some(gain.to_bits()) {
            continue;
        }
        // absorb the community with the shorter row
        let (keep, gone) = if rows[j].len() > rows[i].len() { (j, i) } else { (i, j) };
        let gone_row = std::mem::take(&mut rows[gone]);
        let keep_row = std::mem::take(&mut rows[keep]);
        let mut merged = BTreeMap::new();
        for (&k, &v) in &keep_row {
            if k == gone {
                continue;
            }
            let value = match gone_row.get(&k) {
                Some(&w) => v + w,
                None => v - 2.0 * share[gone] * share[k],
            };
            merged.insert(k, value);
        }
        for (&k, &w) in &gone_row {
            if k == keep || keep_row.contains_key(&k) {
                continue;
            }
            merged.insert(k, w - 2.0 * share[keep] * share[k]);
        }
        for (&k, &value) in &merged {
            rows[k].remove(&gone);
            rows[k].insert(keep, value);
            heap.push((Gain(value), Reverse((keep.min(k), keep.max(k)))));
        }
        rows[keep] = merged;
        share[keep] += share[gone];
        alive[gone] = false;
        let moved = std::mem::take(&mut members[gone]);
        for &v in &moved {
            label[v] = keep;
        }
        members[keep].extend(moved);

        q += gain;
        if q > best_q {
            best_q = q;
            best_labels.clone_from(&label);
        }
    }

    let communities = Communities::from_labels(&best_labels);
    let labels = communities.labels(n);
    (modularity(g, &labels), communities)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clique_edges(nodes: &[usize]) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for (x, &a) in nodes.iter().enumerate() {
            for &b in &nodes[x + 1..] {
                e.push((a, b));
            }
        }
        e
    }

    #[test]
    fn two_disjoint_cliques() {
        let mut edges = clique_edges(&[0, 1, 2, 3]);
        edges.extend(clique_edges(&[4, 5, 6, 7]));
        let g = Graph::from_edges(8, edges).unwrap();
        let (q, c) = modularity_greedy(&g);
        assert!((q - 0.5).abs() < 1e-12);
        assert_eq!(c.groups, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
    }

    #[test]
    fn complete_graph_is_one_community() {
        let g = Graph::from_edges(6, clique_edges(&[0, 1, 2, 3, 4, 5])).unwrap();
        let (q, c) = modularity_greedy(&g);
        assert!(q.abs() < 1e-12);
        assert_eq!(c.groups.len(), 1);
    }

    #[test]
    fn edgeless_is_zero_singletons() {
        let (q, c) = modularity_greedy(&Graph::empty(4));
        assert_eq!(q, 0.0);
        assert_eq!(c.groups.len(), 4);
    }

    #[test]
    fn barbell_splits_at_bridge() {
        let mut edges = clique_edges(&[0, 1, 2, 3, 4]);
        edges.extend(clique_edges(&[5, 6, 7, 8, 9]));
        edges.push((4, 5));
        let g = Graph::from_edges(10, edges).unwrap();
        let (q, c) = modularity_greedy(&g);
        assert_eq!(c.groups, vec![vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]]);
        assert!((q - modularity(&g, &c.labels(10))).abs() < 1e-15);
    }
}
