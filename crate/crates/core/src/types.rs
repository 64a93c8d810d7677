//! Domain types shared by every stage: node signals, weighted graphs,
//! hypergraphs and line-graph structure.
//!
//! All types validate on construction and are immutable afterwards.

use std::collections::HashSet;

use nalgebra::DMatrix;

use crate::error::{HglError, Result};

/// Types that can re-check their own invariants.
pub trait Validate {
    fn validate(&self) -> Result<()>;
}

/// Observed signals, one row per node and one column per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSignals {
    values: DMatrix<f64>,
}

impl NodeSignals {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        let s = NodeSignals { values };
        s.validate()?;
        Ok(s)
    }

    /// Builds signals from row vectors.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(HglError::RaggedRows {
                    row: i,
                    expected: d,
                    found: r.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
    }

    pub fn n_nodes(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_signals(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    /// Returns a copy with rows reordered so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_nodes() {
            return Err(HglError::DegenerateInput(format!(
                "permutation has length {}, expected {}",
                perm.len(),
                self.n_nodes()
            )));
        }
        let v = &self.values;
        Self::new(DMatrix::from_fn(v.nrows(), v.ncols(), |i, j| v[(perm[i], j)]))
    }
}

impl Validate for NodeSignals {
    fn validate(&self) -> Result<()> {
        if self.values.nrows() == 0 {
            return Err(HglError::violation("positive node count", 0, "no rows"));
        }
        if self.values.ncols() == 0 {
            return Err(HglError::violation("positive signal count", 0, "no columns"));
        }
        for i in 0..self.values.nrows() {
            for j in 0..self.values.ncols() {
                let x = self.values[(i, j)];
                if !x.is_finite() {
                    return Err(HglError::violation(
                        "finite entries",
                        i,
                        format!("column {j} holds {x}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Symmetric nonnegative pairwise weights with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    weights: DMatrix<f64>,
}

impl WeightedGraph {
    pub fn new(weights: DMatrix<f64>) -> Result<Self> {
        let g = WeightedGraph { weights };
        g.validate()?;
        Ok(g)
    }

    /// Graph with no edges.
    pub fn empty(n_nodes: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(n_nodes, n_nodes))
    }

    /// Builds a graph from an undirected edge list. Repeated pairs accumulate.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut w = DMatrix::zeros(n_nodes, n_nodes);
        for (k, &(u, v, x)) in edges.iter().enumerate() {
            if u >= n_nodes || v >= n_nodes {
                return Err(HglError::violation(
                    "node range",
                    k,
                    format!("edge ({u},{v}) outside 0..{n_nodes}"),
                ));
            }
            if u == v {
                return Err(HglError::violation("zero diagonal", k, format!("self loop on {u}")));
            }
            w[(u, v)] += x;
            w[(v, u)] += x;
        }
        Self::new(w)
    }

    pub fn n_nodes(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.weights.row(i).sum()
    }

    /// Strictly positive upper-triangular entries as `(u, v, w)` with `u < v`,
    /// in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n_nodes();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let w = self.weights[(i, j)];
                if w > 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Neighbor lists of the support (positive entries), sorted ascending.
    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let n = self.n_nodes();
        (0..n)
            .map(|i| (0..n).filter(|&j| self.weights[(i, j)] > 0.0).collect())
            .collect()
    }

    /// Graph Laplacian `D - W`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.n_nodes();
        let mut l = -self.weights.clone();
        for i in 0..n {
            l[(i, i)] = self.degree(i);
        }
        l
    }

    /// Dirichlet energy `sum_ij W_ij ||x_i - x_j||^2` over ordered pairs.
    pub fn dirichlet_energy(&self, signals: &NodeSignals) -> f64 {
        let x = signals.values();
        let mut e = 0.0;
        for (u, v, w) in self.edges() {
            let d = (x.row(u) - x.row(v)).norm_squared();
            e += 2.0 * w * d;
        }
        e
    }
}

impl Validate for WeightedGraph {
    fn validate(&self) -> Result<()> {
        let w = &self.weights;
        if w.nrows() != w.ncols() {
            return Err(HglError::violation(
                "square matrix",
                0,
                format!("{}x{}", w.nrows(), w.ncols()),
            ));
        }
        if w.nrows() == 0 {
            return Err(HglError::violation("positive node count", 0, "no nodes"));
        }
        let n = w.nrows();
        for i in 0..n {
            if w[(i, i)] != 0.0 {
                return Err(HglError::violation(
                    "zero diagonal",
                    i,
                    format!("weights[{i}][{i}] = {}", w[(i, i)]),
                ));
            }
            for j in 0..n {
                let x = w[(i, j)];
                if !x.is_finite() {
                    return Err(HglError::violation("finite entries", i, format!("column {j} holds {x}")));
                }
                if x < 0.0 {
                    return Err(HglError::violation(
                        "nonnegative entries",
                        i,
                        format!("weights[{i}][{j}] = {x}"),
                    ));
                }
                if x != w[(j, i)] {
                    return Err(HglError::violation(
                        "symmetry",
                        i,
                        format!("weights[{i}][{j}] = {x} but weights[{j}][{i}] = {}", w[(j, i)]),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A set of hyperedges over `n_nodes` nodes. Each hyperedge is stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n_nodes: usize,
    hyperedges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Canonicalizes node order inside each hyperedge, then validates.
    pub fn new(n_nodes: usize, mut hyperedges: Vec<Vec<usize>>) -> Result<Self> {
        for e in &mut hyperedges {
            e.sort_unstable();
        }
        let h = Hypergraph { n_nodes, hyperedges };
        h.validate()?;
        Ok(h)
    }

    /// Like [`Hypergraph::new`] but silently drops hyperedges that repeat an earlier one.
    pub fn new_dedup(n_nodes: usize, hyperedges: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut kept = Vec::with_capacity(hyperedges.len());
        for mut e in hyperedges {
            e.sort_unstable();
            if seen.insert(e.clone()) {
                kept.push(e);
            }
        }
        Self::new(n_nodes, kept)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn len(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperedges.is_empty()
    }

    /// Number of hyperedges containing each node.
    pub fn memberships(&self) -> Vec<usize> {
        let mut m = vec![0; self.n_nodes];
        for e in &self.hyperedges {
            for &v in e {
                m[v] += 1;
            }
        }
        m
    }

    /// Incidence matrix `H` with `H[i][j] = 1` iff node `i` is in hyperedge `j`.
    pub fn incidence(&self) -> DMatrix<u8> {
        let mut h = DMatrix::zeros(self.n_nodes, self.hyperedges.len());
        for (j, e) in self.hyperedges.iter().enumerate() {
            for &i in e {
                h[(i, j)] = 1;
            }
        }
        h
    }

    /// Rebuilds hyperedge sets from an incidence matrix. Any nonzero entry counts as membership.
    pub fn from_incidence(h: &DMatrix<u8>) -> Result<Self> {
        let edges = (0..h.ncols())
            .map(|j| (0..h.nrows()).filter(|&i| h[(i, j)] != 0).collect())
            .collect();
        Self::new(h.nrows(), edges)
    }

    /// Hyperedges as a set of sorted node lists, for order-insensitive comparison.
    pub fn edge_set(&self) -> HashSet<Vec<usize>> {
        self.hyperedges.iter().cloned().collect()
    }
}

impl Validate for Hypergraph {
    fn validate(&self) -> Result<()> {
        if self.n_nodes == 0 {
            return Err(HglError::violation("positive node count", 0, "n_nodes = 0"));
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::with_capacity(self.hyperedges.len());
        for (j, e) in self.hyperedges.iter().enumerate() {
            if e.len() < 2 {
                return Err(HglError::violation(
                    "hyperedge size",
                    j,
                    format!("hyperedge has {} node(s), need at least 2", e.len()),
                ));
            }
            let mut sorted = e.clone();
            sorted.sort_unstable();
            if let Some(&v) = sorted.iter().find(|&&v| v >= self.n_nodes) {
                return Err(HglError::violation(
                    "node range",
                    j,
                    format!("node {v} outside 0..{}", self.n_nodes),
                ));
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(HglError::violation("distinct nodes", j, "node repeated within hyperedge"));
            }
            if !seen.insert(sorted) {
                return Err(HglError::violation("duplicate", j, "hyperedge repeats an earlier one"));
            }
        }
        Ok(())
    }
}

/// Line graph of a weighted graph: one node per positive edge, adjacent when the
/// source edges share an endpoint. Adjacency is kept as sorted neighbor lists.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGraphStruct {
    n_nodes_source: usize,
    source_edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    node_signal: Vec<f64>,
}

impl LineGraphStruct {
    pub fn new(
        n_nodes_source: usize,
        source_edges: Vec<(usize, usize)>,
        adjacency: Vec<Vec<usize>>,
        node_signal: Vec<f64>,
    ) -> Result<Self> {
        let lg = LineGraphStruct {
            n_nodes_source,
            source_edges,
            adjacency,
            node_signal,
        };
        lg.validate()?;
        Ok(lg)
    }

    pub fn n_line_nodes(&self) -> usize {
        self.source_edges.len()
    }

    /// Node count of the graph the line graph was built from.
    pub fn n_nodes_source(&self) -> usize {
        self.n_nodes_source
    }

    pub fn source_edges(&self) -> &[(usize, usize)] {
        &self.source_edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn adjacency_lists(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn is_adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn node_signal(&self) -> &[f64] {
        &self.node_signal
    }

    /// Dense binary adjacency `A^l`.
    pub fn adjacency_dense(&self) -> DMatrix<u8> {
        let l = self.n_line_nodes();
        let mut a = DMatrix::zeros(l, l);
        for (i, nb) in self.adjacency.iter().enumerate() {
            for &j in nb {
                a[(i, j)] = 1;
            }
        }
        a
    }
}

impl Validate for LineGraphStruct {
    fn validate(&self) -> Result<()> {
        let l = self.source_edges.len();
        if l == 0 {
            return Err(HglError::violation("positive line-node count", 0, "no source edges"));
        }
        if self.adjacency.len() != l || self.node_signal.len() != l {
            return Err(HglError::violation(
                "consistent lengths",
                0,
                format!(
                    "{} source edges, {} adjacency rows, {} signals",
                    l,
                    self.adjacency.len(),
                    self.node_signal.len()
                ),
            ));
        }
        let mut incident = vec![0usize; self.n_nodes_source];
        let mut seen = HashSet::with_capacity(l);
        for (i, &(u, v)) in self.source_edges.iter().enumerate() {
            if u >= v || v >= self.n_nodes_source {
                return Err(HglError::violation(
                    "source edge",
                    i,
                    format!("({u},{v}) is not an ordered pair in 0..{}", self.n_nodes_source),
                ));
            }
            if !seen.insert((u, v)) {
                return Err(HglError::violation("source edge", i, format!("({u},{v}) repeated")));
            }
            let x = self.node_signal[i];
            if !(x > 0.0 && x.is_finite()) {
                return Err(HglError::violation("positive node signal", i, format!("x^l = {x}")));
            }
            incident[u] += 1;
            incident[v] += 1;
        }
        for (i, nb) in self.adjacency.iter().enumerate() {
            let (u, v) = self.source_edges[i];
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return Err(HglError::violation("sorted adjacency", i, "neighbor list not strictly ascending"));
            }
            for &j in nb {
                if j >= l || j == i {
                    return Err(HglError::violation("zero diagonal", i, format!("neighbor {j}")));
                }
                let (a, b) = self.source_edges[j];
                if !(a == u || a == v || b == u || b == v) {
                    return Err(HglError::violation(
                        "shared endpoint",
                        i,
                        format!("({u},{v}) and ({a},{b}) share no endpoint"),
                    ));
                }
                if self.adjacency[j].binary_search(&i).is_err() {
                    return Err(HglError::violation("symmetry", i, format!("{j} does not list {i}")));
                }
            }
            // distinct edges share at most one endpoint, so the neighbor count is fixed
            let expected = incident[u] + incident[v] - 2;
            if nb.len() != expected {
                return Err(HglError::violation(
                    "shared endpoint",
                    i,
                    format!("{} neighbors listed, {} edges share an endpoint", nb.len(), expected),
                ));
            }
        }
        Ok(())
    }
}
