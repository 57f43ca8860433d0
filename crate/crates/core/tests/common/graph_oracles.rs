//! Brute-force graph oracles shared by the metric tests and the acceptance run.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeSet;

use hcls::graph::{
    betweenness_scores, circuit_rank, closeness_scores, eigenvector_scores, global_clustering, mean_path_length,
    metric_panel, triangle_count,
};
use hcls::Graph;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const INF: usize = usize::MAX / 4;

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let edges = pairs(n).into_iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, e)| e);
    Graph::from_edges(n, edges).unwrap()
}

pub fn canonical_mask(n: usize, adj: &[Vec<bool>], perms: &[Vec<usize>]) -> u64 {
    let ps = pairs(n);
    perms
        .iter()
        .map(|p| {
            ps.iter()
                .enumerate()
                .filter(|(_, &(i, j))| adj[p[i]][p[j]])
                .fold(0u64, |m, (k, _)| m | 1 << k)
        })
        .min()
        .unwrap()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class, built by attaching a new node
/// to every class of the previous size with every neighbor subset.
pub fn graph_classes(max_n: usize) -> Vec<Graph> {
    let mut all = vec![Graph::empty(1)];
    let mut prev: Vec<u64> = vec![0];
    for n in 2..=max_n {
        let perms = permutations(n);
        let mut seen = BTreeSet::new();
        for &mask in &prev {
            let base = graph_from_mask(n - 1, mask);
            for nbrs in 0u64..(1 << (n - 1)) {
                let mut adj = vec![vec![false; n]; n];
                for &(i, j) in base.edges() {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
                for v in 0..(n - 1) {
                    if nbrs >> v & 1 == 1 {
                        adj[v][n - 1] = true;
                        adj[n - 1][v] = true;
                    }
                }
                seen.insert(canonical_mask(n, &adj, &perms));
            }
        }
        prev = seen.into_iter().collect();
        all.extend(prev.iter().map(|&m| graph_from_mask(n, m)));
    }
    all
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let p = rng.random_range(0.1..0.9);
    Graph::from_edges(n, pairs(n).into_iter().filter(|_| rng.random_bool(p))).unwrap()
}

pub fn floyd(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(i, j) in g.edges() {
        d[i][j] = 1;
        d[j][i] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Every shortest s–t path, by depth-first search along distance-decreasing edges.
pub fn shortest_paths(g: &Graph, d: &[Vec<usize>], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(g: &Graph, d: &[Vec<usize>], v: usize, t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v == t {
            out.push(path.clone());
            return;
        }
        for &w in g.neighbors(v) {
            if d[w][t] + 1 == d[v][t] {
                path.push(w);
                walk(g, d, w, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if d[s][t] < INF {
        walk(g, d, s, t, &mut vec![s], &mut out);
    }
    out
}

pub fn brute_betweenness(g: &Graph, d: &[Vec<usize>]) -> Vec<f64> {
    let n = g.n();
    let mut bc = vec![0.0; n];
    if n < 3 {
        return bc;
    }
    for (s, t) in pairs(n) {
        let paths = shortest_paths(g, d, s, t);
        if paths.is_empty() {
            continue;
        }
        for (v, b) in bc.iter_mut().enumerate() {
            if v != s && v != t {
                let through = paths.iter().filter(|p| p.contains(&v)).count();
                *b += through as f64 / paths.len() as f64;
            }
        }
    }
    let scale = ((n - 1) * (n - 2)) as f64;
    bc.into_iter().map(|b| b / scale).collect()
}

pub fn brute_closeness(d: &[Vec<usize>]) -> Vec<f64> {
    let n = d.len();
    (0..n)
        .map(|i| {
            let reach: Vec<usize> = (0..n).filter(|&j| j != i && d[i][j] < INF).map(|j| d[i][j]).collect();
            let total: usize = reach.iter().sum();
            if total == 0 {
                0.0
            } else {
                let k = reach.len() as f64;
                (k / (n - 1) as f64) * (k / total as f64)
            }
        })
        .collect()
}

pub fn brute_path_length(d: &[Vec<usize>]) -> f64 {
    let finite: Vec<usize> = (0..d.len())
        .flat_map(|i| (0..d.len()).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| d[i][j])
        .filter(|&x| x < INF)
        .collect();
    if finite.is_empty() {
        0.0
    } else {
        finite.iter().sum::<usize>() as f64 / finite.len() as f64
    }
}

pub fn brute_components(d: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = d.len();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for s in 0..n {
        if !seen[s] {
            let c: Vec<usize> = (0..n).filter(|&v| d[s][v] < INF).collect();
            for &v in &c {
                seen[v] = true;
            }
            comps.push(c);
        }
    }
    comps
}

pub fn brute_triangles_and_triples(g: &Graph) -> (u64, u64) {
    let n = g.n();
    let mut tri = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                    tri += 1;
                }
            }
        }
    }
    let mut triples = 0;
    for centre in 0..n {
        for (a, b) in pairs(n) {
            if a != centre && b != centre && g.has_edge(centre, a) && g.has_edge(centre, b) {
                triples += 1;
            }
        }
    }
    (tri, triples)
}

/// Leading eigenvector of the largest component (first by lowest node on
/// ties), unit norm, sign fixed nonnegative.
pub fn dense_eigenvector(g: &Graph, d: &[Vec<usize>]) -> Vec<f64> {
    let n = g.n();
    let mut out = vec![0.0; n];
    let comps = brute_components(d);
    let size = comps.iter().map(Vec::len).max().unwrap_or(0);
    if size < 2 {
        return out;
    }
    let comp = comps.iter().find(|c| c.len() == size).unwrap();
    let a = DMatrix::from_fn(size, size, |i, j| if g.has_edge(comp[i], comp[j]) { 1.0 } else { 0.0 });
    let eig = a.symmetric_eigen();
    let top = eig.eigenvalues.imax();
    let v = eig.eigenvectors.column(top);
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    for (k, &node) in comp.iter().enumerate() {
        out[node] = sign * v[k];
    }
    out
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + b.abs())
}

pub fn check_against_oracles(g: &Graph) {
    let d = floyd(g);
    let label = format!("{:?} on {} nodes", g.edges(), g.n());

    for (a, b) in betweenness_scores(g).iter().zip(brute_betweenness(g, &d)) {
        assert!(close(*a, b, 1e-12), "betweenness {a} vs {b}: {label}");
    }
    for (a, b) in closeness_scores(g).iter().zip(brute_closeness(&d)) {
        assert!(close(*a, b, 1e-12), "closeness {a} vs {b}: {label}");
    }
    assert!(close(mean_path_length(g), brute_path_length(&d), 1e-12), "path length: {label}");

    let comps = brute_components(&d);
    assert_eq!(circuit_rank(g), g.m() + comps.len() - g.n(), "circuit rank: {label}");
    let (tri, triples) = brute_triangles_and_triples(g);
    assert_eq!(triangle_count(g), tri, "triangles: {label}");
    let c = if triples == 0 { 0.0 } else { 3.0 * tri as f64 / triples as f64 };
    assert!(close(global_clustering(g), c, 1e-12), "clustering: {label}");

    for (a, b) in eigenvector_scores(g).iter().zip(dense_eigenvector(g, &d)) {
        assert!((a - b).abs() <= 1e-8, "eigenvector {a} vs {b}: {label}");
    }

    let panel = metric_panel(g);
    assert_eq!(panel.triangles, tri);
    assert_eq!(panel.components, comps.len());
}

/// Q = (1/2m) Σᵢⱼ (Aᵢⱼ − kᵢkⱼ/2m) δ(cᵢ, cⱼ), summed over all ordered pairs.
pub fn double_sum_modularity(g: &Graph, labels: &[usize]) -> f64 {
    let two_m = 2.0 * g.m() as f64;
    if two_m == 0.0 {
        return 0.0;
    }
    let k = g.degrees();
    let mut q = 0.0;
    for i in 0..g.n() {
        for j in 0..g.n() {
            if labels[i] == labels[j] {
                let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
                q += a - (k[i] * k[j]) as f64 / two_m;
            }
        }
    }
    q / two_m
}

/// All set partitions as restricted growth strings.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(prefix: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=max + 1 {
            prefix.push(c);
            grow(prefix, n, max.max(c), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        grow(&mut vec![0], n, 0, &mut out);
    }
    out
}

