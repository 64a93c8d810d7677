//! Synthetic ground truth: hypergraph structure with a controlled overlapping rate and
//! Gaussian node signals whose precision matrix is built from smooth per-hyperedge
//! subgraphs.
//!
//! Structure and signals draw from two separate `ChaCha8Rng` streams of the same seed
//! (stream 0 and stream 1), so regenerating signals for a fixed structure is stable.

use std::collections::HashSet;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{HglError, Result};
use crate::io;
use crate::types::{Hypergraph, NodeSignals, WeightedGraph};

/// Smallest generated edge weight.
const WEIGHT_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub n_nodes: usize,
    /// Per-hyperedge overlapping rate allowed when a hyperedge is accepted.
    pub max_overlap: f64,
    pub size_min: usize,
    pub size_max: usize,
    /// Signal columns per node.
    pub n_samples: usize,
    /// Probability of each non-tree pair inside a hyperedge becoming an edge.
    pub intra_edge_prob: f64,
    pub weight_base_min: f64,
    pub weight_base_max: f64,
    pub weight_jitter: f64,
    /// Added to the Laplacian diagonal to make the precision matrix definite.
    pub diag_load: f64,
    /// Generation stops after this many consecutive rejected candidates.
    pub max_rejects: usize,
    /// Hard cap on the number of hyperedges.
    pub max_hyperedges: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_nodes: 20,
            max_overlap: 0.0,
            size_min: 3,
            size_max: 6,
            n_samples: 2000,
            intra_edge_prob: 0.2,
            weight_base_min: 0.5,
            weight_base_max: 3.0,
            weight_jitter: 0.05,
            diag_load: 1.0,
            max_rejects: 200,
            max_hyperedges: 1000,
            seed: 0,
        }
    }
}

impl GenConfig {
    /// 200-node scale with hyperedges of 4 to 10 nodes.
    pub fn large() -> Self {
        GenConfig {
            n_nodes: 200,
            size_min: 4,
            size_max: 10,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HglError::InvalidConfig(m));
        if self.n_nodes == 0 {
            return bad("n_nodes must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.max_overlap) {
            return bad(format!("max_overlap must lie in [0, 1], got {}", self.max_overlap));
        }
        if self.size_min < 2 || self.size_min > self.size_max {
            return bad(format!(
                "size range [{}, {}] must satisfy 2 <= min <= max",
                self.size_min, self.size_max
            ));
        }
        if self.n_samples == 0 {
            return bad("n_samples must be positive".into());
        }
        if !(self.intra_edge_prob > 0.0 && self.intra_edge_prob <= 1.0) {
            return bad(format!("intra_edge_prob must lie in (0, 1], got {}", self.intra_edge_prob));
        }
        if !(self.weight_base_min > 0.0 && self.weight_base_min <= self.weight_base_max) {
            return bad(format!(
                "weight base range [{}, {}] must be a positive interval",
                self.weight_base_min, self.weight_base_max
            ));
        }
        if !(self.weight_jitter >= 0.0) {
            return bad(format!("weight_jitter must be nonnegative, got {}", self.weight_jitter));
        }
        if !(self.diag_load > 0.0) {
            return bad(format!("diag_load must be positive, got {}", self.diag_load));
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Generated dataset with everything needed to evaluate a learner.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub hypergraph: Hypergraph,
    /// Union of the per-hyperedge subgraphs.
    pub pairwise_graph: WeightedGraph,
    /// `Laplacian(pairwise_graph) + diag_load * I`.
    pub precision: DMatrix<f64>,
    pub signals: NodeSignals,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub config: GenConfig,
    pub n_hyperedges: usize,
    pub overlap_rate: f64,
    pub per_hyperedge_overlap: Vec<f64>,
}

/// Per-hyperedge overlapping rate (share of its nodes lying in more than one hyperedge)
/// and their mean.
pub fn overlap_rate(h: &Hypergraph) -> Result<(Vec<f64>, f64)> {
    if h.is_empty() {
        return Err(HglError::EmptyHypergraph);
    }
    let m = h.memberships();
    let per: Vec<f64> = h
        .hyperedges()
        .iter()
        .map(|e| e.iter().filter(|&&v| m[v] > 1).count() as f64 / e.len() as f64)
        .collect();
    let mean = per.iter().sum::<f64>() / per.len() as f64;
    Ok((per, mean))
}

fn shared_count(e: &[usize], membership: &[usize]) -> usize {
    e.iter().filter(|&&v| membership[v] > 1).count()
}

/// Grows a hypergraph one candidate at a time.
///
/// A candidate has a uniform size; its slots are filled with already-used nodes with
/// probability `remaining budget / remaining slots`, where the budget is the number of
/// shared nodes `max_overlap` allows, and with unused nodes otherwise. A candidate is
/// accepted when it is new, its own overlapping rate is within `max_overlap`, and no
/// existing hyperedge is pushed above `max_overlap` by it.
pub fn generate_structure(cfg: &GenConfig) -> Result<Hypergraph> {
    cfg.validate()?;
    let n = cfg.n_nodes;
    if n < cfg.size_min {
        return Err(HglError::Infeasible(format!(
            "{n} nodes cannot hold a hyperedge of {} nodes",
            cfg.size_min
        )));
    }
    if cfg.size_max > n {
        return Err(HglError::Infeasible(format!(
            "size_max {} exceeds n_nodes {n}",
            cfg.size_max
        )));
    }
    let mut rng = cfg.rng(0);
    let mut membership = vec![0usize; n];
    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut rejects = 0;

    while rejects < cfg.max_rejects && edges.len() < cfg.max_hyperedges {
        let size = rng.random_range(cfg.size_min..=cfg.size_max);
        let mut budget = (cfg.max_overlap * size as f64 + 1e-9).floor() as usize;
        let mut unused: Vec<usize> = (0..n).filter(|&v| membership[v] == 0).collect();
        let mut used: Vec<usize> = (0..n).filter(|&v| membership[v] > 0).collect();
        let mut cand = Vec::with_capacity(size);
        for slot in 0..size {
            let left = (size - slot) as f64;
            let take_used = if used.is_empty() {
                false
            } else if unused.is_empty() {
                true
            } else {
                rng.random::<f64>() < budget as f64 / left
            };
            let pool = if take_used { &mut used } else { &mut unused };
            let k = rng.random_range(0..pool.len());
            cand.push(pool.swap_remove(k));
            if take_used {
                budget = budget.saturating_sub(1);
            }
        }
        cand.sort_unstable();

        if accept(&cand, &edges, &membership, &seen, cfg.max_overlap) {
            for &v in &cand {
                membership[v] += 1;
            }
            seen.insert(cand.clone());
            edges.push(cand);
            rejects = 0;
        } else {
            rejects += 1;
        }
    }
    if edges.is_empty() {
        return Err(HglError::Infeasible("no hyperedge could be placed".into()));
    }
    Hypergraph::new(n, edges)
}

fn accept(
    cand: &[usize],
    edges: &[Vec<usize>],
    membership: &[usize],
    seen: &HashSet<Vec<usize>>,
    max_overlap: f64,
) -> bool {
    if seen.contains(cand) {
        return false;
    }
    let eps = 1e-12;
    let shared = cand.iter().filter(|&&v| membership[v] > 0).count();
    if shared as f64 / cand.len() as f64 > max_overlap + eps {
        return false;
    }
    if shared == 0 {
        return true;
    }
    let mut after = membership.to_vec();
    for &v in cand {
        after[v] += 1;
    }
    edges
        .iter()
        .all(|e| shared_count(e, &after) as f64 / e.len() as f64 <= max_overlap + eps)
}

/// Uniform random labeled tree on `0..s` via a Prüfer sequence.
fn random_tree(s: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if s < 2 {
        return Vec::new();
    }
    if s == 2 {
        return vec![(0, 1)];
    }
    let seq: Vec<usize> = (0..s - 2).map(|_| rng.random_range(0..s)).collect();
    let mut degree = vec![1usize; s];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(s - 1);
    for &x in &seq {
        let leaf = (0..s).find(|&v| degree[v] == 1).expect("a leaf exists");
        edges.push((leaf.min(x), leaf.max(x)));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..s).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Builds the pairwise graph, the precision matrix and Gaussian signals with that precision.
pub fn generate_signals(h: &Hypergraph, cfg: &GenConfig) -> Result<(WeightedGraph, DMatrix<f64>, NodeSignals)> {
    cfg.validate()?;
    let n = h.n_nodes();
    let mut rng = cfg.rng(1);
    let mut w = DMatrix::zeros(n, n);
    for e in h.hyperedges() {
        let s = e.len();
        let mut local = vec![vec![false; s]; s];
        for (a, b) in random_tree(s, &mut rng) {
            local[a][b] = true;
        }
        for a in 0..s {
            for b in (a + 1)..s {
                if !local[a][b] && rng.random::<f64>() < cfg.intra_edge_prob {
                    local[a][b] = true;
                }
            }
        }
        let base = rng.random_range(cfg.weight_base_min..=cfg.weight_base_max);
        for a in 0..s {
            for b in (a + 1)..s {
                if !local[a][b] {
                    continue;
                }
                let jitter = if cfg.weight_jitter > 0.0 {
                    rng.random_range(-cfg.weight_jitter..=cfg.weight_jitter)
                } else {
                    0.0
                };
                let x = (base + jitter).max(WEIGHT_FLOOR);
                let (u, v) = (e[a], e[b]);
                w[(u, v)] += x;
                w[(v, u)] += x;
            }
        }
    }
    let graph = WeightedGraph::new(w)?;
    let mut precision = graph.laplacian();
    for i in 0..n {
        precision[(i, i)] += cfg.diag_load;
    }
    let signals = sample_precision(&precision, cfg.n_samples, &mut rng)?;
    Ok((graph, precision, signals))
}

/// Draws `n_samples` columns from `N(0, precision^-1)`: with `precision = U^T U`,
/// each column solves `U x = e` for a standard normal `e`.
pub fn sample_precision(precision: &DMatrix<f64>, n_samples: usize, rng: &mut ChaCha8Rng) -> Result<NodeSignals> {
    let n = precision.nrows();
    let chol = precision
        .clone()
        .cholesky()
        .ok_or_else(|| HglError::NumericalFailure("precision matrix is not positive definite".into()))?;
    let upper = chol.l().transpose();
    let mut e = DMatrix::zeros(n, n_samples);
    for i in 0..n {
        for j in 0..n_samples {
            e[(i, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let x = upper
        .solve_upper_triangular(&e)
        .ok_or_else(|| HglError::NumericalFailure("singular Cholesky factor".into()))?;
    NodeSignals::new(x)
}

/// Structure then signals, from one config.
pub fn generate(cfg: &GenConfig) -> Result<GroundTruth> {
    let hypergraph = generate_structure(cfg)?;
    let (pairwise_graph, precision, signals) = generate_signals(&hypergraph, cfg)?;
    Ok(GroundTruth {
        hypergraph,
        pairwise_graph,
        precision,
        signals,
    })
}

impl GroundTruth {
    pub fn meta(&self, cfg: &GenConfig) -> Result<DatasetMeta> {
        let (per, rate) = overlap_rate(&self.hypergraph)?;
        Ok(DatasetMeta {
            config: *cfg,
            n_hyperedges: self.hypergraph.len(),
            overlap_rate: rate,
            per_hyperedge_overlap: per,
        })
    }

    /// Writes `hypergraph.json`, `signals.csv`, `pairwise_graph.csv` and `meta.json`.
    pub fn write_dir(&self, dir: &Path, cfg: &GenConfig) -> Result<DatasetMeta> {
        std::fs::create_dir_all(dir).map_err(|e| HglError::io(dir, e))?;
        io::write_hypergraph_json(&self.hypergraph, dir.join(io::HYPERGRAPH_FILE))?;
        io::write_signals_csv(&self.signals, dir.join(io::SIGNALS_FILE))?;
        io::write_graph_csv(&self.pairwise_graph, dir.join(io::PAIRWISE_GRAPH_FILE))?;
        let meta = self.meta(cfg)?;
        io::write_json(&meta, dir.join(io::META_FILE))?;
        Ok(meta)
    }
}

/// Seed of the `index`-th dataset of a batch. It does not depend on the overlap
/// regime, so regimes are compared on the same random draws.
pub fn dataset_seed(global: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(global ^ mix(index))
}

/// Shuffles `0..n` with the given seed; used for permutation tests.
pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut rng);
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_examples() {
        let h = Hypergraph::new(5, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        let (per, mean) = overlap_rate(&h).unwrap();
        assert_eq!(per, vec![1.0 / 3.0, 1.0 / 3.0]);
        assert!((mean - 1.0 / 3.0).abs() < 1e-15);

        let h = Hypergraph::new(4, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        let (per, mean) = overlap_rate(&h).unwrap();
        assert_eq!(per, vec![2.0 / 3.0, 2.0 / 3.0]);
        assert!((mean - 2.0 / 3.0).abs() < 1e-15);

        let h = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(overlap_rate(&h).unwrap().1, 0.0);

        let empty = Hypergraph::new(4, vec![]).unwrap();
        assert!(matches!(overlap_rate(&empty), Err(HglError::EmptyHypergraph)));
    }

    #[test]
    fn random_tree_is_spanning() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for s in 2..9 {
            let t = random_tree(s, &mut rng);
            assert_eq!(t.len(), s - 1);
            let g = WeightedGraph::from_edges(s, &t.iter().map(|&(a, b)| (a, b, 1.0)).collect::<Vec<_>>()).unwrap();
            // connected: BFS from 0 reaches all
            let nb = g.neighbors();
            let mut seen = vec![false; s];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for &v in &nb[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            assert!(seen.iter().all(|&x| x));
        }
    }

    #[test]
    fn single_pair_hyperedge() {
        let h = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let cfg = GenConfig {
            n_nodes: 2,
            size_min: 2,
            size_max: 2,
            n_samples: 10,
            ..Default::default()
        };
        let (g, prec, _) = generate_signals(&h, &cfg).unwrap();
        assert_eq!(g.n_edges(), 1);
        let w = g.weight(0, 1);
        assert!(w > 0.0);
        assert_eq!(prec[(0, 1)], -w);
        assert_eq!(prec[(0, 0)], w + cfg.diag_load);
    }

    #[test]
    fn infeasible_sizes() {
        let cfg = GenConfig {
            n_nodes: 2,
            ..Default::default()
        };
        assert!(matches!(generate_structure(&cfg), Err(HglError::Infeasible(_))));
    }

    #[test]
    fn config_rejects_bad_ranges() {
        let cfg = GenConfig {
            max_overlap: 1.5,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = GenConfig {
            size_min: 1,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
