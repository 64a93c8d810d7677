//! Leiden community detection with the weighted modularity quality function.
//!
//! Each level runs three phases:
//!
//! 1. fast local moving with a work queue,
//! 2. refinement: inside every community found in (1), nodes start as singletons and
//!    are merged into well-connected sub-communities, picked at random with
//!    probability proportional to `exp(gain / theta)`,
//! 3. aggregation of the refined partition, with the unrefined partition as the
//!    starting assignment on the aggregate network.
//!
//! Levels repeat until the local moving phase leaves every aggregate node in its own
//! community or aggregation no longer shrinks the network. Refinement only ever merges a
//! node into a sub-community it has an edge to, so every community is connected.
//!
//! Randomness comes from a `ChaCha8Rng` seeded with `LeidenConfig::seed`; one stream
//! is consumed per call, so a given input and seed always yield the same partition on
//! every platform.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HglError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LeidenConfig {
    /// Resolution `gamma` of the modularity null-model term.
    pub resolution: f64,
    pub seed: u64,
    pub max_levels: usize,
    /// Randomness of refinement merges.
    pub theta: f64,
}

impl Default for LeidenConfig {
    fn default() -> Self {
        LeidenConfig {
            resolution: 1.0,
            seed: 0,
            max_levels: 32,
            theta: 0.01,
        }
    }
}

impl LeidenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(HglError::InvalidConfig(format!(
                "resolution must be positive, got {}",
                self.resolution
            )));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(HglError::InvalidConfig(format!("theta must be positive, got {}", self.theta)));
        }
        if self.max_levels == 0 {
            return Err(HglError::InvalidConfig("max_levels must be positive".into()));
        }
        Ok(())
    }
}

/// Disjoint cover of nodes by communities `0..n_communities`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    community_of: Vec<usize>,
    n_communities: usize,
}

impl Partition {
    /// Validates that ids are exactly `0..k` with every id used.
    pub fn new(community_of: Vec<usize>) -> Result<Self> {
        let k = community_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut used = vec![false; k];
        for &c in &community_of {
            used[c] = true;
        }
        if let Some(c) = used.iter().position(|u| !u) {
            return Err(HglError::violation("community ids contiguous", c, "id unused"));
        }
        Ok(Partition {
            community_of,
            n_communities: k,
        })
    }

    /// Relabels arbitrary labels to `0..k` in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let community_of = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Partition {
            community_of,
            n_communities: map.len(),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            community_of: (0..n).collect(),
            n_communities: n,
        }
    }

    pub fn community_of(&self) -> &[usize] {
        &self.community_of
    }

    pub fn n_communities(&self) -> usize {
        self.n_communities
    }

    pub fn len(&self) -> usize {
        self.community_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.community_of.is_empty()
    }

    /// Member lists per community, each ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_communities];
        for (v, &c) in self.community_of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = HglError;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.community_of
    }
}

/// Quality after each level, on the original network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeidenReport {
    pub level_quality: Vec<f64>,
    pub final_quality: f64,
}

/// Symmetric weighted adjacency lists (no self loops) from a dense matrix; zero entries are skipped.
pub fn adjacency_from_dense(w: &nalgebra::DMatrix<f64>) -> Vec<Vec<(usize, f64)>> {
    (0..w.nrows())
        .map(|i| {
            (0..w.ncols())
                .filter(|&j| j != i && w[(i, j)] > 0.0)
                .map(|j| (j, w[(i, j)]))
                .collect()
        })
        .collect()
}

/// Weighted modularity `(1/2m) sum_ij (W_ij - gamma k_i k_j / 2m) [c_i = c_j]`.
pub fn modularity(w: &[Vec<(usize, f64)>], part: &Partition, resolution: f64) -> Result<f64> {
    if part.len() != w.len() {
        return Err(HglError::DegenerateInput(format!(
            "partition covers {} nodes, graph has {}",
            part.len(),
            w.len()
        )));
    }
    let cof = part.community_of();
    let mut internal = vec![0.0; part.n_communities()];
    let mut total = vec![0.0; part.n_communities()];
    let mut two_m = 0.0;
    for (i, row) in w.iter().enumerate() {
        for &(j, x) in row {
            two_m += x;
            total[cof[i]] += x;
            if cof[i] == cof[j] {
                internal[cof[i]] += x;
            }
        }
    }
    if two_m <= 0.0 {
        return Err(HglError::EmptyGraph("total edge weight is zero".into()));
    }
    let q: f64 = internal
        .iter()
        .zip(&total)
        .map(|(&inside, &k)| inside - resolution * k * k / two_m)
        .sum();
    Ok(q / two_m)
}

/// True when every community induces a connected subgraph of the binary adjacency `a`.
pub fn communities_connected(a: &[Vec<usize>], part: &Partition) -> bool {
    let cof = part.community_of();
    let mut seen = vec![false; a.len()];
    let mut visited_comm = vec![false; part.n_communities()];
    for start in 0..a.len() {
        if seen[start] {
            continue;
        }
        let c = cof[start];
        if visited_comm[c] {
            // a second component of the same community
            return false;
        }
        visited_comm[c] = true;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &v in &a[u] {
                if !seen[v] && cof[v] == c {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    true
}

/// Detects communities on weighted adjacency `w`; `a` is the binary structure the
/// weights live on.
pub fn leiden(w: &[Vec<(usize, f64)>], a: &[Vec<usize>], cfg: &LeidenConfig) -> Result<Partition> {
    leiden_with_report(w, a, cfg).map(|(p, _)| p)
}

pub fn leiden_with_report(
    w: &[Vec<(usize, f64)>],
    a: &[Vec<usize>],
    cfg: &LeidenConfig,
) -> Result<(Partition, LeidenReport)> {
    cfg.validate()?;
    check_inputs(w, a)?;
    let n = w.len();
    let net = Network::from_adjacency(w);
    if net.two_m <= 0.0 {
        let p = Partition::singletons(n);
        let report = LeidenReport {
            level_quality: Vec::new(),
            final_quality: 0.0,
        };
        return Ok((p, report));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let gamma = cfg.resolution;
    let mut net = net;
    // original node -> aggregate node
    let mut membership: Vec<usize> = (0..n).collect();
    let mut comm: Vec<usize> = (0..n).collect();
    let mut level_quality = Vec::new();

    for _ in 0..cfg.max_levels {
        move_nodes_fast(&net, &mut comm, gamma, &mut rng);
        let n_comm = relabel(&mut comm);
        let flat: Vec<usize> = membership.iter().map(|&m| comm[m]).collect();
        level_quality.push(modularity(w, &Partition::from_labels(&flat), gamma)?);
        if n_comm == net.len() {
            break;
        }
        let mut refined = refine(&net, &comm, n_comm, gamma, cfg.theta, &mut rng);
        let n_ref = relabel(&mut refined);
        if n_ref == net.len() {
            break;
        }
        let (agg, agg_comm) = net.aggregate(&refined, n_ref, &comm);
        for m in membership.iter_mut() {
            *m = refined[*m];
        }
        net = agg;
        comm = agg_comm;
    }

    let flat: Vec<usize> = membership.iter().map(|&m| comm[m]).collect();
    let part = split_disconnected(w, &Partition::from_labels(&flat));
    let final_quality = modularity(w, &part, gamma)?;
    Ok((
        part,
        LeidenReport {
            level_quality,
            final_quality,
        },
    ))
}

fn check_inputs(w: &[Vec<(usize, f64)>], a: &[Vec<usize>]) -> Result<()> {
    let n = w.len();
    if n == 0 {
        return Err(HglError::EmptyGraph("no nodes".into()));
    }
    if a.len() != n {
        return Err(HglError::DegenerateInput(format!(
            "weighted adjacency has {n} rows, binary adjacency has {}",
            a.len()
        )));
    }
    for (i, row) in w.iter().enumerate() {
        for &(j, x) in row {
            if j >= n || j == i {
                return Err(HglError::violation("weighted adjacency", i, format!("neighbor {j}")));
            }
            if !(x >= 0.0 && x.is_finite()) {
                return Err(HglError::violation("nonnegative entries", i, format!("weight {x} to {j}")));
            }
            if x > 0.0 && !a[i].contains(&j) {
                return Err(HglError::violation(
                    "weights within adjacency",
                    i,
                    format!("positive weight to {j} without a structural edge"),
                ));
            }
        }
    }
    Ok(())
}

/// Network at some aggregation level. `self_w` holds the ordered-pair weight inside each node.
struct Network {
    adj: Vec<Vec<(usize, f64)>>,
    self_w: Vec<f64>,
    degree: Vec<f64>,
    two_m: f64,
}

impl Network {
    fn from_adjacency(w: &[Vec<(usize, f64)>]) -> Self {
        let adj: Vec<Vec<(usize, f64)>> = w
            .iter()
            .map(|row| row.iter().copied().filter(|&(_, x)| x > 0.0).collect())
            .collect();
        let degree: Vec<f64> = adj.iter().map(|r| r.iter().map(|&(_, x)| x).sum()).collect();
        let two_m = degree.iter().sum();
        let self_w = vec![0.0; adj.len()];
        Network {
            adj,
            self_w,
            degree,
            two_m,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Collapses `groups` into single nodes; returns the aggregate and the induced initial assignment.
    fn aggregate(&self, groups: &[usize], n_groups: usize, comm: &[usize]) -> (Network, Vec<usize>) {
        let mut self_w = vec![0.0; n_groups];
        let mut degree = vec![0.0; n_groups];
        let mut agg_comm = vec![0; n_groups];
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_groups];
        for v in 0..self.len() {
            let g = groups[v];
            self_w[g] += self.self_w[v];
            degree[g] += self.degree[v];
            agg_comm[g] = comm[v];
            for &(u, x) in &self.adj[v] {
                let h = groups[u];
                if h == g {
                    self_w[g] += x;
                } else {
                    rows[g].push((h, x));
                }
            }
        }
        let adj = rows
            .into_iter()
            .map(|mut r| {
                r.sort_unstable_by_key(|&(h, _)| h);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(r.len());
                for (h, x) in r {
                    match merged.last_mut() {
                        Some(last) if last.0 == h => last.1 += x,
                        _ => merged.push((h, x)),
                    }
                }
                merged
            })
            .collect();
        let net = Network {
            adj,
            self_w,
            degree,
            two_m: self.two_m,
        };
        (net, agg_comm)
    }
}

/// Relabels to `0..k` by first appearance; returns `k`.
fn relabel(labels: &mut [usize]) -> usize {
    let mut map = vec![usize::MAX; labels.len().max(labels.iter().map(|&l| l + 1).max().unwrap_or(0))];
    let mut next = 0;
    for l in labels.iter_mut() {
        if map[*l] == usize::MAX {
            map[*l] = next;
            next += 1;
        }
        *l = map[*l];
    }
    next
}

/// Queue-based local moving. Node `v` moves to the neighbouring (or an empty) community
/// with the largest gain `w(v,C) - gamma k_v K_C / 2m`, if that beats staying.
fn move_nodes_fast(net: &Network, comm: &mut [usize], gamma: f64, rng: &mut ChaCha8Rng) {
    let n = net.len();
    let mut total = vec![0.0; n];
    let mut size = vec![0usize; n];
    for v in 0..n {
        total[comm[v]] += net.degree[v];
        size[comm[v]] += 1;
    }
    let mut empty: Vec<usize> = (0..n).filter(|&c| size[c] == 0).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut queue: VecDeque<usize> = order.into_iter().collect();
    let mut in_queue = vec![true; n];

    let mut link = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let scale = gamma / net.two_m;

    while let Some(v) = queue.pop_front() {
        in_queue[v] = false;
        let kv = net.degree[v];
        let old = comm[v];

        for &(u, x) in &net.adj[v] {
            let c = comm[u];
            if link[c] == 0.0 {
                touched.push(c);
            }
            link[c] += x;
        }

        total[old] -= kv;
        size[old] -= 1;
        if size[old] == 0 {
            empty.push(old);
        }

        let mut best = old;
        let mut best_gain = link[old] - scale * kv * total[old];
        for &c in &touched {
            let gain = link[c] - scale * kv * total[c];
            if gain > best_gain {
                best = c;
                best_gain = gain;
            }
        }
        if best_gain < 0.0 {
            // an empty community has gain exactly zero
            best = if size[old] == 0 { old } else { *empty.last().expect("n communities suffice") };
        }

        if size[best] == 0 {
            let pos = empty.iter().rposition(|&c| c == best).expect("empty community listed");
            empty.swap_remove(pos);
        }
        total[best] += kv;
        size[best] += 1;
        comm[v] = best;

        for &c in &touched {
            link[c] = 0.0;
        }
        touched.clear();

        if best != old {
            for &(u, _) in &net.adj[v] {
                if !in_queue[u] && comm[u] != best {
                    in_queue[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
}

/// Refines each community of `comm` into well-connected sub-communities.
fn refine(
    net: &Network,
    comm: &[usize],
    n_comm: usize,
    gamma: f64,
    theta: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let n = net.len();
    let scale = gamma / net.two_m;
    let mut refined: Vec<usize> = (0..n).collect();
    let mut ref_total: Vec<f64> = net.degree.clone();
    let mut ref_size = vec![1usize; n];

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_comm];
    for v in 0..n {
        members[comm[v]].push(v);
    }
    let comm_total: Vec<f64> = members
        .iter()
        .map(|m| m.iter().map(|&v| net.degree[v]).sum())
        .collect();

    // weight from each node to the rest of its own community
    let to_own: Vec<f64> = (0..n)
        .map(|v| {
            net.adj[v]
                .iter()
                .filter(|&&(u, _)| comm[u] == comm[v])
                .map(|&(_, x)| x)
                .sum()
        })
        .collect();
    // weight from each refined sub-community to the rest of its community
    let mut ref_external = to_own.clone();

    let mut link = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut cands: Vec<(usize, f64)> = Vec::new();

    for (c, nodes) in members.iter().enumerate() {
        let kc = comm_total[c];
        let mut order: Vec<usize> = nodes
            .iter()
            .copied()
            .filter(|&v| to_own[v] >= scale * net.degree[v] * (kc - net.degree[v]))
            .collect();
        order.shuffle(rng);

        for v in order {
            if ref_size[refined[v]] != 1 {
                continue;
            }
            let kv = net.degree[v];
            let own = refined[v];
            for &(u, x) in &net.adj[v] {
                if comm[u] != c {
                    continue;
                }
                let t = refined[u];
                if link[t] == 0.0 {
                    touched.push(t);
                }
                link[t] += x;
            }

            cands.clear();
            cands.push((own, 0.0));
            for &t in &touched {
                if t == own {
                    continue;
                }
                let kt = ref_total[t];
                if ref_external[t] < scale * kt * (kc - kt) {
                    continue;
                }
                let gain = link[t] - scale * kv * kt;
                if gain >= 0.0 {
                    cands.push((t, gain));
                }
            }

            let chosen = if cands.len() == 1 {
                own
            } else {
                let top = cands.iter().map(|&(_, g)| g).fold(f64::NEG_INFINITY, f64::max);
                let weights: Vec<f64> = cands.iter().map(|&(_, g)| ((g - top) / theta).exp()).collect();
                let sum: f64 = weights.iter().sum();
                let mut r = rng.random::<f64>() * sum;
                let mut pick = cands[cands.len() - 1].0;
                for (&(t, _), &wt) in cands.iter().zip(&weights) {
                    if r < wt {
                        pick = t;
                        break;
                    }
                    r -= wt;
                }
                pick
            };

            if chosen != own {
                let lv = link[chosen];
                ref_external[chosen] += ref_external[own] - 2.0 * lv;
                ref_total[chosen] += kv;
                ref_size[chosen] += 1;
                ref_total[own] = 0.0;
                ref_size[own] = 0;
                ref_external[own] = 0.0;
                refined[v] = chosen;
            }

            for &t in &touched {
                link[t] = 0.0;
            }
            touched.clear();
        }
    }
    refined
}

/// Splits any community whose members are not connected through positive weights.
fn split_disconnected(w: &[Vec<(usize, f64)>], part: &Partition) -> Partition {
    let cof = part.community_of();
    let n = w.len();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(v, x) in &w[u] {
                if x > 0.0 && label[v] == usize::MAX && cof[v] == cof[u] {
                    label[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    Partition::from_labels(&label)
}
