//! File formats: signals CSV, hypergraph JSON, weighted edge-list CSV and
//! dataset directories.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HglError, Result};
use crate::types::{Hypergraph, NodeSignals, WeightedGraph};

pub const HYPERGRAPH_FILE: &str = "hypergraph.json";
pub const SIGNALS_FILE: &str = "signals.csv";
pub const PAIRWISE_GRAPH_FILE: &str = "pairwise_graph.csv";
pub const META_FILE: &str = "meta.json";

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HglError::io(path, e))
}

fn write_string(path: &Path, s: &str) -> Result<()> {
    fs::write(path, s).map_err(|e| HglError::io(path, e))
}

fn csv_error(e: csv::Error) -> HglError {
    let (row, col) = match e.position() {
        Some(p) => (p.record() as usize, 0),
        None => (0, 0),
    };
    HglError::Parse {
        row,
        col,
        msg: e.to_string(),
    }
}

/// Parses signals from CSV text: one row per node, one numeric column per observation.
pub fn parse_signals_csv(text: &str, has_header: bool) -> Result<NodeSignals> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let mut vals = Vec::with_capacity(rec.len());
        for (col, field) in rec.iter().enumerate() {
            let x: f64 = field.parse().map_err(|_| HglError::Parse {
                row,
                col,
                msg: format!("'{field}' is not a number"),
            })?;
            vals.push(x);
        }
        if let Some(first) = rows.first() {
            if first.len() != vals.len() {
                return Err(HglError::RaggedRows {
                    row,
                    expected: first.len(),
                    found: vals.len(),
                });
            }
        }
        rows.push(vals);
    }
    NodeSignals::from_rows(&rows)
}

pub fn read_signals_csv(path: impl AsRef<Path>, has_header: bool) -> Result<NodeSignals> {
    parse_signals_csv(&read_to_string(path.as_ref())?, has_header)
}

pub fn signals_to_csv(signals: &NodeSignals) -> String {
    let v = signals.values();
    let mut out = String::with_capacity(v.len() * 20);
    for i in 0..v.nrows() {
        for j in 0..v.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}", v[(i, j)]));
        }
        out.push('\n');
    }
    out
}

/// Writes without a header row; floats use shortest round-trip formatting.
pub fn write_signals_csv(signals: &NodeSignals, path: impl AsRef<Path>) -> Result<()> {
    write_string(path.as_ref(), &signals_to_csv(signals))
}

#[derive(Serialize, Deserialize)]
struct HypergraphFile {
    n_nodes: usize,
    hyperedges: Vec<Vec<usize>>,
}

pub fn parse_hypergraph_json(text: &str) -> Result<Hypergraph> {
    let raw: HypergraphFile = serde_json::from_str(text).map_err(|e| HglError::Parse {
        row: e.line(),
        col: e.column(),
        msg: e.to_string(),
    })?;
    Hypergraph::new(raw.n_nodes, raw.hyperedges)
}

pub fn hypergraph_to_json(h: &Hypergraph) -> String {
    let raw = HypergraphFile {
        n_nodes: h.n_nodes(),
        hyperedges: h.hyperedges().to_vec(),
    };
    serde_json::to_string(&raw).expect("hypergraph serializes")
}

pub fn read_hypergraph_json(path: impl AsRef<Path>) -> Result<Hypergraph> {
    parse_hypergraph_json(&read_to_string(path.as_ref())?)
}

pub fn write_hypergraph_json(h: &Hypergraph, path: impl AsRef<Path>) -> Result<()> {
    write_string(path.as_ref(), &hypergraph_to_json(h))
}

/// Parses an edge list of the form
///
/// ```text
/// # n_nodes=4
/// 0,1,0.5
/// 1,3,2
/// ```
///
/// An optional `u,v,w` header line is accepted.
pub fn parse_graph_csv(text: &str) -> Result<WeightedGraph> {
    let mut n_nodes = None;
    for line in text.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('#') {
            if let Some(v) = rest.trim().strip_prefix("n_nodes=") {
                n_nodes = Some(v.trim().parse::<usize>().map_err(|_| HglError::Parse {
                    row: 0,
                    col: 0,
                    msg: format!("bad n_nodes value '{v}'"),
                })?);
            }
        }
    }
    let n_nodes = n_nodes.ok_or_else(|| HglError::Parse {
        row: 0,
        col: 0,
        msg: "missing '# n_nodes=N' header line".into(),
    })?;

    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut edges = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        if row == 0 && rec.iter().eq(["u", "v", "w"]) {
            continue;
        }
        if rec.len() != 3 {
            return Err(HglError::RaggedRows {
                row,
                expected: 3,
                found: rec.len(),
            });
        }
        let u: usize = rec[0].parse().map_err(|_| HglError::Parse {
            row,
            col: 0,
            msg: format!("'{}' is not a node index", &rec[0]),
        })?;
        let v: usize = rec[1].parse().map_err(|_| HglError::Parse {
            row,
            col: 1,
            msg: format!("'{}' is not a node index", &rec[1]),
        })?;
        let w: f64 = rec[2].parse().map_err(|_| HglError::Parse {
            row,
            col: 2,
            msg: format!("'{}' is not a number", &rec[2]),
        })?;
        if u >= v {
            return Err(HglError::violation("ordered edge", row, format!("edge ({u},{v}) needs u < v")));
        }
        edges.push((u, v, w));
    }
    WeightedGraph::from_edges(n_nodes, &edges)
}

pub fn graph_to_csv(g: &WeightedGraph) -> String {
    let mut out = format!("# n_nodes={}\n", g.n_nodes());
    for (u, v, w) in g.edges() {
        out.push_str(&format!("{u},{v},{w}\n"));
    }
    out
}

pub fn read_graph_csv(path: impl AsRef<Path>) -> Result<WeightedGraph> {
    parse_graph_csv(&read_to_string(path.as_ref())?)
}

pub fn write_graph_csv(g: &WeightedGraph, path: impl AsRef<Path>) -> Result<()> {
    write_string(path.as_ref(), &graph_to_csv(g))
}

/// Serializes any value as pretty JSON to `path`.
pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let s = serde_json::to_string_pretty(value).expect("value serializes");
    write_string(path.as_ref(), &s)
}

/// A dataset directory: `signals.csv` plus, when available, the
/// ground-truth `hypergraph.json`.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub dir: PathBuf,
    pub signals: NodeSignals,
    pub truth: Option<Hypergraph>,
}

/// Loads a dataset directory. Works for generated datasets and for any external
/// dataset converted into the same two files.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let signals = read_signals_csv(dir.join(SIGNALS_FILE), false)?;
    let truth_path = dir.join(HYPERGRAPH_FILE);
    let truth = if truth_path.exists() {
        let h = read_hypergraph_json(&truth_path)?;
        if h.n_nodes() != signals.n_nodes() {
            return Err(HglError::NodeCountMismatch {
                learned: signals.n_nodes(),
                truth: h.n_nodes(),
            });
        }
        Some(h)
    } else {
        None
    };
    Ok(Dataset {
        dir: dir.to_path_buf(),
        signals,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_two_by_one() {
        let s = parse_signals_csv("1.0\n2.0", false).unwrap();
        assert_eq!((s.n_nodes(), s.n_signals()), (2, 1));
        assert_eq!(s.values()[(1, 0)], 2.0);
    }

    #[test]
    fn header_flag_skips_first_row() {
        let s = parse_signals_csv("a,b\n1,2\n3,4\n", true).unwrap();
        assert_eq!((s.n_nodes(), s.n_signals()), (2, 2));
    }

    #[test]
    fn malformed_cell_is_parse_error() {
        match parse_signals_csv("1.0,2.0\nabc,3.0\n", false) {
            Err(HglError::Parse { row, col, .. }) => assert_eq!((row, col), (1, 0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ragged_rows_detected() {
        assert!(matches!(
            parse_signals_csv("1,2\n3\n", false),
            Err(HglError::RaggedRows { row: 1, .. })
        ));
    }

    #[test]
    fn hypergraph_json_parses_and_canonicalizes() {
        let h = parse_hypergraph_json(r#"{"n_nodes":3,"hyperedges":[[2,0,1]]}"#).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.hyperedges()[0], vec![0, 1, 2]);
        assert_eq!(hypergraph_to_json(&h), r#"{"n_nodes":3,"hyperedges":[[0,1,2]]}"#);
    }

    #[test]
    fn hypergraph_json_node_range() {
        assert!(matches!(
            parse_hypergraph_json(r#"{"n_nodes":3,"hyperedges":[[5]]}"#),
            Err(HglError::InvariantViolation { .. })
        ));
        assert!(matches!(
            parse_hypergraph_json(r#"{"n_nodes":3,"hyperedges":[[0,5]]}"#),
            Err(HglError::InvariantViolation { invariant: "node range", .. })
        ));
        assert!(matches!(parse_hypergraph_json("{"), Err(HglError::Parse { .. })));
    }

    #[test]
    fn graph_csv_format() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 0.5), (2, 3, 1.25)]).unwrap();
        let text = graph_to_csv(&g);
        assert_eq!(text, "# n_nodes=4\n0,1,0.5\n2,3,1.25\n");
        assert_eq!(parse_graph_csv(&text).unwrap(), g);
        let with_header = "# n_nodes=4\nu,v,w\n0,1,0.5\n2,3,1.25\n";
        assert_eq!(parse_graph_csv(with_header).unwrap(), g);
        assert!(parse_graph_csv("0,1,1\n").is_err());
        assert!(parse_graph_csv("# n_nodes=3\n1,0,1\n").is_err());
    }
}
