//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hgl_core::{Hypergraph, WeightedGraph};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi style graph with random positive weights.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> WeightedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, rng.random_range(0.1..3.0)));
            }
        }
    }
    WeightedGraph::from_edges(n, &edges).unwrap()
}

/// Squared distances between random points, so the instance is a genuine metric.
pub fn random_distances(n: usize, dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    DMatrix::from_fn(n, n, |i, j| {
        pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum()
    })
}

/// Full-matrix graph-learning objective written as plain loops.
pub fn gl_objective(w: &DMatrix<f64>, z: &DMatrix<f64>, alpha: f64, beta: f64) -> f64 {
    let n = w.nrows();
    let mut total = 0.0;
    for i in 0..n {
        let mut deg = 0.0;
        for j in 0..n {
            total += w[(i, j)] * z[(i, j)] + beta * w[(i, j)] * w[(i, j)];
            deg += w[(i, j)];
        }
        total -= alpha * deg.ln();
    }
    total
}

/// Projected gradient descent with backtracking on the upper-triangular weights.
/// Returns the minimizing weight matrix and its objective.
pub fn gl_oracle(z: &DMatrix<f64>, alpha: f64, beta: f64) -> (DMatrix<f64>, f64) {
    let n = z.nrows();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let f = |w: &[f64]| -> f64 {
        let mut deg = vec![0.0; n];
        let mut val = 0.0;
        for (k, &(i, j)) in pairs.iter().enumerate() {
            deg[i] += w[k];
            deg[j] += w[k];
            val += 2.0 * z[(i, j)] * w[k] + 2.0 * beta * w[k] * w[k];
        }
        if deg.iter().any(|&d| d <= 0.0) {
            return f64::INFINITY;
        }
        val - alpha * deg.iter().map(|d| d.ln()).sum::<f64>()
    };
    let grad = |w: &[f64]| -> Vec<f64> {
        let mut deg = vec![0.0; n];
        for (k, &(i, j)) in pairs.iter().enumerate() {
            deg[i] += w[k];
            deg[j] += w[k];
        }
        pairs
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| 2.0 * z[(i, j)] + 4.0 * beta * w[k] - alpha / deg[i] - alpha / deg[j])
            .collect()
    };
    let mut w = vec![1.0; pairs.len()];
    let mut fw = f(&w);
    let mut step = 1.0;
    for _ in 0..200_000 {
        let g = grad(&w);
        loop {
            let cand: Vec<f64> = w.iter().zip(&g).map(|(x, d)| (x - step * d).max(0.0)).collect();
            let fc = f(&cand);
            let lin: f64 = cand.iter().zip(&w).zip(&g).map(|((c, x), d)| d * (c - x)).sum();
            let sq: f64 = cand.iter().zip(&w).map(|(c, x)| (c - x) * (c - x)).sum();
            if fc.is_finite() && fc <= fw + lin + sq / (2.0 * step) {
                let moved = sq.sqrt();
                w = cand;
                fw = fc;
                step *= 1.5;
                if moved < 1e-14 {
                    return finish(n, &pairs, &w, fw);
                }
                break;
            }
            step *= 0.5;
            if step < 1e-20 {
                return finish(n, &pairs, &w, fw);
            }
        }
    }
    finish(n, &pairs, &w, fw)
}

fn finish(n: usize, pairs: &[(usize, usize)], w: &[f64], fw: f64) -> (DMatrix<f64>, f64) {
    let mut m = DMatrix::zeros(n, n);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        m[(i, j)] = w[k];
        m[(j, i)] = w[k];
    }
    (m, fw)
}

/// Line graph by pairwise endpoint intersection over positive edges in row-major order.
pub fn brute_line_graph(g: &WeightedGraph) -> (Vec<(usize, usize)>, Vec<f64>, DMatrix<u8>) {
    let n = g.n_nodes();
    let mut edges = Vec::new();
    let mut signal = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if g.weight(i, j) > 0.0 {
                edges.push((i, j));
                signal.push(g.weight(i, j));
            }
        }
    }
    let l = edges.len();
    let a = DMatrix::from_fn(l, l, |p, q| {
        let (a, b) = edges[p];
        let (c, d) = edges[q];
        u8::from(p != q && (a == c || a == d || b == c || b == d))
    });
    (edges, signal, a)
}

/// Modularity by the textbook double sum over all node pairs.
pub fn brute_modularity(w: &DMatrix<f64>, labels: &[usize], gamma: f64) -> f64 {
    let n = w.nrows();
    let k: Vec<f64> = (0..n).map(|i| w.row(i).sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += w[(i, j)] - gamma * k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=max + 1 {
            cur.push(c);
            rec(i + 1, n, max.max(c), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur = vec![0];
    rec(1, n, 0, &mut cur, &mut out);
    out
}

/// Maximal cliques by checking every vertex subset.
pub fn brute_cliques(adj: &DMatrix<u8>, min_size: usize) -> BTreeSet<Vec<usize>> {
    let n = adj.nrows();
    let is_clique = |s: &[usize]| s.iter().all(|&a| s.iter().all(|&b| a == b || adj[(a, b)] == 1));
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        if s.len() < min_size || !is_clique(&s) {
            continue;
        }
        let maximal = (0..n).filter(|i| !s.contains(i)).all(|v| {
            let mut t = s.clone();
            t.push(v);
            !is_clique(&t)
        });
        if maximal {
            out.insert(s);
        }
    }
    out
}

/// Random hypergraph with distinct hyperedges of size at least 2.
pub fn random_hypergraph(n: usize, max_edges: usize, rng: &mut ChaCha8Rng) -> Hypergraph {
    let count = rng.random_range(0..=max_edges);
    let mut set = BTreeSet::new();
    for _ in 0..count {
        let size = rng.random_range(2..=n.min(5));
        let mut e: Vec<usize> = (0..n).collect();
        for i in 0..size {
            let j = rng.random_range(i..n);
            e.swap(i, j);
        }
        let mut e = e[..size].to_vec();
        e.sort_unstable();
        set.insert(e);
    }
    Hypergraph::new(n, set.into_iter().collect()).unwrap()
}
