//! Hypergraph structure learning from node signals.
//!
//! The learner works in two steps. A weighted graph is first learned from the
//! signals so that connected nodes carry similar signals. The learned graph is then
//! turned into its line graph, whose nodes are the learned edges and whose signals
//! are the edge weights; communities found there with Leiden become hyperedges.
//!
//! The crate also ships a synthetic benchmark generator, three baselines sharing the
//! same output contract, and recall/precision/F1 evaluation.

pub mod cliques;
pub mod error;
pub mod graphlearn;
pub mod io;
pub mod kmeans;
pub mod leiden;
pub mod linegraph;
pub mod metrics;
pub mod pipeline;
pub mod synthgen;
pub mod types;

pub use error::{ErrorClass, HglError, Result};
pub use graphlearn::{learn_graph, GLConfig, GLReport, PruneThreshold};
pub use leiden::{leiden, LeidenConfig, Partition};
pub use linegraph::{build_line_graph, weight_line_graph, WeightedLineGraph};
pub use metrics::{aggregate, evaluate, EvalResult, Matching};
pub use pipeline::{hgl, HGLConfig, MethodResult};
pub use synthgen::{GenConfig, GroundTruth};
pub use types::{Hypergraph, LineGraphStruct, NodeSignals, Validate, WeightedGraph};
