use std::collections::BTreeMap;
use std::path::Path;

use hgl_core::io::{self, Dataset};
use hgl_core::pipeline::{baseline_clique, baseline_clustering, baseline_clustering_swept, baseline_community};
use hgl_core::{evaluate, hgl, Hypergraph, MethodResult, NodeSignals};
use serde_json::{json, Value};

use crate::config::{Method, RunConfig};
use crate::error::CliResult;

pub const DIAGNOSTICS_FILE: &str = "diagnostics.json";
pub const LEARNED_GRAPH_FILE: &str = "learned_graph.csv";

/// Runs one method. `truth` is used only to pick the clustering `k` when none is configured.
pub fn run_method(method: Method, signals: &NodeSignals, truth: Option<&Hypergraph>, cfg: &RunConfig) -> CliResult<MethodResult> {
    let b = &cfg.baselines;
    let r = match method {
        Method::Hgl => hgl(signals, &cfg.hgl),
        Method::Clustering => match b.clustering.k.or(truth.map(Hypergraph::len)) {
            Some(k) => baseline_clustering(signals, k, &b.clustering),
            None => baseline_clustering_swept(signals, &b.clustering),
        },
        Method::Community => baseline_community(signals, &cfg.hgl.gl, &b.community),
        Method::Clique => baseline_clique(signals, &cfg.hgl.gl, &b.clique),
    }?;
    Ok(r)
}

/// Loads a dataset directory, or a bare signals CSV file.
pub fn load(path: &Path, header: bool) -> CliResult<Dataset> {
    if path.is_file() {
        return Ok(Dataset {
            dir: path.parent().unwrap_or(Path::new(".")).to_path_buf(),
            signals: io::read_signals_csv(path, header)?,
            truth: None,
        });
    }
    Ok(io::load_dataset(path)?)
}

pub fn run(method: Method, dataset: &Path, header: bool, cfg: &RunConfig, out: &Path, save_graph: bool) -> CliResult<MethodResult> {
    let data = load(dataset, header)?;
    let result = run_method(method, &data.signals, data.truth.as_ref(), cfg)?;
    io::write_hypergraph_json(&result.hypergraph, out.join(io::HYPERGRAPH_FILE))?;

    let mut diag: BTreeMap<String, Value> = result.diagnostics.clone();
    diag.insert("method".into(), json!(method.name()));
    diag.insert("dataset".into(), json!(dataset.display().to_string()));
    diag.insert("n_nodes".into(), json!(data.signals.n_nodes()));
    diag.insert("n_signals".into(), json!(data.signals.n_signals()));
    if let Some(t) = &data.truth {
        let e = evaluate(&result.hypergraph, t, cfg.metrics.matching, cfg.metrics.jaccard_threshold)?;
        diag.insert("evaluation".into(), json!(e));
    }
    io::write_json(&diag, out.join(DIAGNOSTICS_FILE))?;
    if save_graph {
        if let Some(g) = &result.learned_graph {
            io::write_graph_csv(g, out.join(LEARNED_GRAPH_FILE))?;
        }
    }
    Ok(result)
}
