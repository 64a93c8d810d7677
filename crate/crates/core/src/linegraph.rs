//! Line graph of a learned graph and its Gaussian-kernel edge weighting.

use crate::error::{HglError, Result};
use crate::types::{LineGraphStruct, WeightedGraph};

/// Line graph with kernel weights `exp(-(x_i - x_j)^2 / 2)` on structural adjacencies.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedLineGraph {
    structure: LineGraphStruct,
    /// `weights[i][k]` is the weight towards `structure.neighbors(i)[k]`.
    weights: Vec<Vec<f64>>,
}

impl WeightedLineGraph {
    pub fn structure(&self) -> &LineGraphStruct {
        &self.structure
    }

    pub fn n_line_nodes(&self) -> usize {
        self.structure.n_line_nodes()
    }

    /// Neighbors of `i` paired with their kernel weight.
    pub fn weighted_neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.structure
            .neighbors(i)
            .iter()
            .copied()
            .zip(self.weights[i].iter().copied())
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match self.structure.neighbors(i).binary_search(&j) {
            Ok(k) => self.weights[i][k],
            Err(_) => 0.0,
        }
    }

    /// Sparse weighted adjacency lists for community detection.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        (0..self.n_line_nodes())
            .map(|i| self.weighted_neighbors(i).collect())
            .collect()
    }

    /// CSV edge list `i,j,w,(u1-v1),(u2-v2)` over structural adjacencies with `i < j`.
    pub fn to_csv(&self) -> String {
        let src = self.structure.source_edges();
        let mut out = format!("# n_line_nodes={}\n", self.n_line_nodes());
        for i in 0..self.n_line_nodes() {
            for (j, w) in self.weighted_neighbors(i) {
                if i < j {
                    let (a, b) = src[i];
                    let (c, d) = src[j];
                    out.push_str(&format!("{i},{j},{w},({a}-{b}),({c}-{d})\n"));
                }
            }
        }
        out
    }
}

/// Builds the line graph: one node per positive edge of `graph`, in the order of
/// [`WeightedGraph::edges`], adjacent when the source edges share an endpoint.
pub fn build_line_graph(graph: &WeightedGraph) -> Result<LineGraphStruct> {
    let edges = graph.edges();
    if edges.is_empty() {
        return Err(HglError::EmptyGraph("graph has no positive-weight edges".into()));
    }
    let n = graph.n_nodes();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, &(u, v, _)) in edges.iter().enumerate() {
        incident[u].push(k);
        incident[v].push(k);
    }
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
    for inc in &incident {
        for (a, &i) in inc.iter().enumerate() {
            for &j in &inc[a + 1..] {
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
    }
    for nb in &mut adjacency {
        nb.sort_unstable();
    }
    let source_edges = edges.iter().map(|&(u, v, _)| (u, v)).collect();
    let signal = edges.iter().map(|&(_, _, w)| w).collect();
    LineGraphStruct::new(n, source_edges, adjacency, signal)
}

/// Applies the Gaussian kernel on line-graph node signals.
///
/// With `standardize`, signals are shifted to zero mean and unit variance first.
/// A constant signal is only centred.
pub fn weight_line_graph(lg: &LineGraphStruct, standardize: bool) -> WeightedLineGraph {
    let raw = lg.node_signal();
    let x: Vec<f64> = if standardize {
        let n = raw.len() as f64;
        let mean = raw.iter().sum::<f64>() / n;
        let var = raw.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        let scale = if sd > 0.0 { 1.0 / sd } else { 1.0 };
        raw.iter().map(|v| (v - mean) * scale).collect()
    } else {
        raw.to_vec()
    };
    let weights = (0..lg.n_line_nodes())
        .map(|i| {
            lg.neighbors(i)
                .iter()
                .map(|&j| {
                    let d = x[i] - x[j];
                    (-0.5 * d * d).exp()
                })
                .collect()
        })
        .collect();
    WeightedLineGraph {
        structure: lg.clone(),
        weights,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let lg = build_line_graph(&g).unwrap();
        assert_eq!(lg.n_line_nodes(), 2);
        assert_eq!(lg.source_edges(), &[(0, 1), (1, 2)]);
        assert!(lg.is_adjacent(0, 1));
    }

    #[test]
    fn triangle_becomes_triangle() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 2.0), (0, 2, 3.0)]).unwrap();
        let lg = build_line_graph(&g).unwrap();
        assert_eq!(lg.n_line_nodes(), 3);
        for i in 0..3 {
            assert_eq!(lg.neighbors(i).len(), 2);
        }
        assert_eq!(lg.node_signal(), &[1.0, 3.0, 2.0]);
    }

    #[test]
    fn empty_graph_rejected() {
        let g = WeightedGraph::empty(4).unwrap();
        assert!(matches!(build_line_graph(&g), Err(HglError::EmptyGraph(_))));
    }

    #[test]
    fn kernel_values() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 2.0)]).unwrap();
        let wl = weight_line_graph(&build_line_graph(&g).unwrap(), false);
        assert!((wl.weight(0, 1) - (-0.5f64).exp()).abs() < 1e-15);
        assert!((wl.weight(0, 1) - 0.606531).abs() < 1e-6);
        assert_eq!(wl.weight(1, 2), 1.0);
        // (0,1) and (2,3) share no endpoint
        assert_eq!(wl.weight(0, 2), 0.0);
        assert_eq!(wl.weight(1, 1), 0.0);
    }

    #[test]
    fn standardized_kernel() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 10.0), (1, 2, 30.0)]).unwrap();
        let wl = weight_line_graph(&build_line_graph(&g).unwrap(), true);
        // standardized signals are -1 and +1
        assert!((wl.weight(0, 1) - (-2.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn csv_annotation() {
        let g = WeightedGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let wl = weight_line_graph(&build_line_graph(&g).unwrap(), false);
        assert_eq!(wl.to_csv(), "# n_line_nodes=2\n0,1,1,(0-1),(1-2)\n");
    }
}
