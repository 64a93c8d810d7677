//! End-to-end hypergraph learning and the three baselines that share its output contract.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cliques::maximal_cliques;
use crate::error::{HglError, Result};
use crate::graphlearn::{learn_graph, GLConfig, GLReport};
use crate::kmeans::{kmeans, silhouette};
use crate::leiden::{leiden, LeidenConfig, Partition};
use crate::linegraph::{build_line_graph, weight_line_graph};
use crate::types::{Hypergraph, LineGraphStruct, NodeSignals, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HGLConfig {
    pub gl: GLConfig,
    pub leiden: LeidenConfig,
    /// Standardize edge signals before the line-graph kernel.
    pub standardize_edge_signals: bool,
}

impl HGLConfig {
    pub fn validate(&self) -> Result<()> {
        self.gl.validate()?;
        self.leiden.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusteringConfig {
    /// Number of clusters; `None` means "use the ground-truth hyperedge count".
    pub k: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        ClusteringConfig {
            k: None,
            restarts: 10,
            max_iters: 300,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliqueConfig {
    pub min_size: usize,
    pub cap: usize,
}

impl Default for CliqueConfig {
    fn default() -> Self {
        CliqueConfig {
            min_size: 2,
            cap: 1_000_000,
        }
    }
}

/// Output of any learning method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub hypergraph: Hypergraph,
    pub learned_graph: Option<WeightedGraph>,
    pub diagnostics: BTreeMap<String, Value>,
}

fn ms(t: Instant) -> Value {
    json!(t.elapsed().as_secs_f64() * 1e3)
}

fn gl_diagnostics(d: &mut BTreeMap<String, Value>, g: &WeightedGraph, r: &GLReport) {
    d.insert("gl_iterations".into(), json!(r.iterations_run));
    d.insert("gl_converged".into(), json!(r.converged));
    d.insert("gl_final_objective".into(), json!(r.objective_trace.last()));
    d.insert("gl_prune_threshold".into(), json!(r.prune_threshold));
    d.insert("learned_edges".into(), json!(g.n_edges()));
}

/// Each line-graph community becomes the union of the endpoints of its member edges.
/// Repeated node sets are merged.
pub fn communities_to_hyperedges(lg: &LineGraphStruct, part: &Partition) -> Result<Hypergraph> {
    let src = lg.source_edges();
    let edges = part
        .communities()
        .into_iter()
        .map(|members| {
            let mut nodes: Vec<usize> = members.iter().flat_map(|&e| [src[e].0, src[e].1]).collect();
            nodes.sort_unstable();
            nodes.dedup();
            nodes
        })
        .collect();
    Hypergraph::new_dedup(lg.n_nodes_source(), edges)
}

/// Line-graph community detection on an already learned graph.
pub fn hyperedges_from_graph(graph: &WeightedGraph, cfg: &HGLConfig) -> Result<(Hypergraph, usize, usize)> {
    let lg = build_line_graph(graph).map_err(|e| e.at("line graph"))?;
    let wl = weight_line_graph(&lg, cfg.standardize_edge_signals);
    let part = leiden(&wl.adjacency(), lg.adjacency_lists(), &cfg.leiden).map_err(|e| e.at("line-graph community detection"))?;
    let h = communities_to_hyperedges(&lg, &part)?;
    Ok((h, lg.n_line_nodes(), part.n_communities()))
}

/// Graph learning followed by line-graph community detection.
pub fn hgl(signals: &NodeSignals, cfg: &HGLConfig) -> Result<MethodResult> {
    cfg.validate()?;
    let t = Instant::now();
    let (graph, report) = learn_graph(signals, &cfg.gl).map_err(|e| e.at("graph learning"))?;
    let t_gl = ms(t);
    let t = Instant::now();
    let (hypergraph, n_line, n_comm) = hyperedges_from_graph(&graph, cfg)?;
    let mut d = BTreeMap::new();
    gl_diagnostics(&mut d, &graph, &report);
    d.insert("line_nodes".into(), json!(n_line));
    d.insert("communities".into(), json!(n_comm));
    d.insert("hyperedges".into(), json!(hypergraph.len()));
    d.insert("time_gl_ms".into(), t_gl);
    d.insert("time_lgcd_ms".into(), ms(t));
    Ok(MethodResult {
        hypergraph,
        learned_graph: Some(graph),
        diagnostics: d,
    })
}

/// k-means on raw signal rows; every cluster with at least two nodes is a hyperedge.
pub fn baseline_clustering(signals: &NodeSignals, k: usize, cfg: &ClusteringConfig) -> Result<MethodResult> {
    let n = signals.n_nodes();
    if k == 0 || k > n {
        return Err(HglError::DegenerateInput(format!("k = {k} must lie in 1..={n}")));
    }
    let t = Instant::now();
    let fit = kmeans(signals.values(), k, cfg.restarts, cfg.max_iters, cfg.seed).map_err(|e| e.at("k-means"))?;
    let groups = Partition::from_labels(&fit.labels).communities();
    let edges: Vec<Vec<usize>> = groups.into_iter().filter(|g| g.len() >= 2).collect();
    let hypergraph = Hypergraph::new_dedup(n, edges)?;
    let mut d = BTreeMap::new();
    d.insert("k".into(), json!(k));
    d.insert("inertia".into(), json!(fit.inertia));
    d.insert("hyperedges".into(), json!(hypergraph.len()));
    d.insert("time_ms".into(), ms(t));
    Ok(MethodResult {
        hypergraph,
        learned_graph: None,
        diagnostics: d,
    })
}

/// Clustering baseline with `k` chosen from `2..=N/2` by mean silhouette, for
/// datasets without ground truth.
pub fn baseline_clustering_swept(signals: &NodeSignals, cfg: &ClusteringConfig) -> Result<MethodResult> {
    let n = signals.n_nodes();
    let hi = (n / 2).max(2).min(n);
    let mut best: Option<(f64, usize)> = None;
    for k in 2..=hi {
        let fit = kmeans(signals.values(), k, cfg.restarts, cfg.max_iters, cfg.seed).map_err(|e| e.at("k-means"))?;
        let s = silhouette(signals.values(), &fit.labels);
        if best.is_none_or(|(b, _)| s > b) {
            best = Some((s, k));
        }
    }
    let (score, k) = best.ok_or_else(|| HglError::DegenerateInput(format!("cannot sweep k with {n} nodes")))?;
    let mut r = baseline_clustering(signals, k, cfg)?;
    r.diagnostics.insert("k_swept".into(), json!(true));
    r.diagnostics.insert("silhouette".into(), json!(score));
    Ok(r)
}

/// Graph learning followed by node-level community detection on the learned graph.
pub fn baseline_community(signals: &NodeSignals, gl: &GLConfig, lc: &LeidenConfig) -> Result<MethodResult> {
    let t = Instant::now();
    let (graph, report) = learn_graph(signals, gl).map_err(|e| e.at("graph learning"))?;
    let t_gl = ms(t);
    let t = Instant::now();
    let hypergraph = communities_of_graph(&graph, lc).map_err(|e| e.at("community detection"))?;
    let mut d = BTreeMap::new();
    gl_diagnostics(&mut d, &graph, &report);
    d.insert("hyperedges".into(), json!(hypergraph.len()));
    d.insert("time_gl_ms".into(), t_gl);
    d.insert("time_cd_ms".into(), ms(t));
    Ok(MethodResult {
        hypergraph,
        learned_graph: Some(graph),
        diagnostics: d,
    })
}

/// Leiden on the nodes of `graph`; communities with two or more nodes become hyperedges.
pub fn communities_of_graph(graph: &WeightedGraph, lc: &LeidenConfig) -> Result<Hypergraph> {
    if graph.n_edges() == 0 {
        return Err(HglError::EmptyGraph("learned graph has no edges".into()));
    }
    let w = crate::leiden::adjacency_from_dense(graph.weights());
    let a = graph.neighbors();
    let part = leiden(&w, &a, lc)?;
    let edges = part.communities().into_iter().filter(|c| c.len() >= 2).collect();
    Hypergraph::new_dedup(graph.n_nodes(), edges)
}

/// Graph learning followed by maximal clique enumeration on the binarized learned graph.
pub fn baseline_clique(signals: &NodeSignals, gl: &GLConfig, cc: &CliqueConfig) -> Result<MethodResult> {
    if cc.min_size < 2 {
        return Err(HglError::InvalidConfig(format!("clique min_size must be at least 2, got {}", cc.min_size)));
    }
    let t = Instant::now();
    let (graph, report) = learn_graph(signals, gl).map_err(|e| e.at("graph learning"))?;
    let t_gl = ms(t);
    let t = Instant::now();
    let hypergraph = cliques_of_graph(&graph, cc).map_err(|e| e.at("clique enumeration"))?;
    let mut d = BTreeMap::new();
    gl_diagnostics(&mut d, &graph, &report);
    d.insert("hyperedges".into(), json!(hypergraph.len()));
    d.insert("time_gl_ms".into(), t_gl);
    d.insert("time_clique_ms".into(), ms(t));
    Ok(MethodResult {
        hypergraph,
        learned_graph: Some(graph),
        diagnostics: d,
    })
}

pub fn cliques_of_graph(graph: &WeightedGraph, cc: &CliqueConfig) -> Result<Hypergraph> {
    let cliques = maximal_cliques(&graph.neighbors(), cc.min_size, cc.cap)?;
    Hypergraph::new_dedup(graph.n_nodes(), cliques)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_union() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 5.0)]).unwrap();
        let lg = build_line_graph(&g).unwrap();
        let part = Partition::new(vec![0, 0, 1]).unwrap();
        let h = communities_to_hyperedges(&lg, &part).unwrap();
        assert_eq!(h.hyperedges(), &[vec![0, 1, 2], vec![2, 3]]);
    }

    #[test]
    fn clustering_extremes() {
        let s = NodeSignals::from_rows(&[vec![0.0], vec![1.0], vec![5.0], vec![9.0]]).unwrap();
        let cfg = ClusteringConfig::default();
        assert!(baseline_clustering(&s, 4, &cfg).unwrap().hypergraph.is_empty());
        let one = baseline_clustering(&s, 1, &cfg).unwrap();
        assert_eq!(one.hypergraph.hyperedges(), &[vec![0, 1, 2, 3]]);
        assert!(matches!(baseline_clustering(&s, 5, &cfg), Err(HglError::DegenerateInput(_))));
    }

    #[test]
    fn swept_clustering_finds_two_groups() {
        let rows: Vec<Vec<f64>> = [0.0, 0.1, 0.2, 0.3, 9.0, 9.1, 9.2, 9.3].iter().map(|&v| vec![v]).collect();
        let s = NodeSignals::from_rows(&rows).unwrap();
        let r = baseline_clustering_swept(&s, &ClusteringConfig::default()).unwrap();
        assert_eq!(r.hypergraph.hyperedges(), &[vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
        assert_eq!(r.diagnostics["k"], json!(2));
    }

    #[test]
    fn stage_is_named_in_errors() {
        let s = NodeSignals::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let mut cfg = HGLConfig::default();
        cfg.gl.max_iters = 0;
        let e = hgl(&s, &cfg).unwrap_err();
        assert!(matches!(e.root(), HglError::InvalidConfig(_)));
    }

    #[test]
    fn community_on_empty_graph() {
        let g = WeightedGraph::empty(3).unwrap();
        assert!(matches!(
            communities_of_graph(&g, &LeidenConfig::default()),
            Err(HglError::EmptyGraph(_))
        ));
    }

    #[test]
    fn clique_hyperedges() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let cc = CliqueConfig {
            min_size: 3,
            ..Default::default()
        };
        assert_eq!(cliques_of_graph(&g, &cc).unwrap().hyperedges(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn two_nodes_give_at_most_one_hyperedge() {
        let s = NodeSignals::from_rows(&[vec![0.0, 1.0], vec![0.5, -1.0]]).unwrap();
        let r = hgl(&s, &HGLConfig::default()).unwrap();
        assert!(r.hypergraph.len() <= 1);
        if let Some(e) = r.hypergraph.hyperedges().first() {
            assert_eq!(e, &vec![0, 1]);
        }
    }
}
