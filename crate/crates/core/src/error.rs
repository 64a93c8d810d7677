use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the learning pipeline.
#[derive(Debug, Error)]
pub enum HglError {
    #[error("invariant violated ({invariant}) at index {index}: {detail}")]
    InvariantViolation {
        invariant: &'static str,
        index: usize,
        detail: String,
    },

    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },

    #[error("ragged rows: row {row} has {found} columns, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("degenerate degree: node {node} has degree {degree}")]
    DegenerateDegree { node: usize, degree: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("empty graph: {0}")]
    EmptyGraph(String),

    #[error("empty hypergraph")]
    EmptyHypergraph,

    #[error("empty result list")]
    EmptyList,

    #[error("infeasible generation: {0}")]
    Infeasible(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("clique explosion: more than {cap} maximal cliques")]
    CliqueExplosion { cap: usize },

    #[error("node count mismatch: learned has {learned}, truth has {truth}")]
    NodeCountMismatch { learned: usize, truth: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("{stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<HglError>,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse error classes, used by the CLI to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Numeric,
    Io,
}

impl HglError {
    pub fn class(&self) -> ErrorClass {
        use HglError::*;
        match self {
            InvariantViolation { .. }
            | Parse { .. }
            | RaggedRows { .. }
            | DegenerateInput(_)
            | NodeCountMismatch { .. }
            | InvalidConfig(_)
            | EmptyList => ErrorClass::Validation,
            DegenerateDegree { .. }
            | EmptyGraph(_)
            | EmptyHypergraph
            | Infeasible(_)
            | NumericalFailure(_)
            | CliqueExplosion { .. } => ErrorClass::Numeric,
            Io { .. } => ErrorClass::Io,
            Stage { source, .. } => source.class(),
        }
    }

    /// Tags the error with the pipeline stage it came from.
    pub fn at(self, stage: &'static str) -> Self {
        match self {
            e @ HglError::Stage { .. } => e,
            e => HglError::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The error with stage tags removed.
    pub fn root(&self) -> &HglError {
        match self {
            HglError::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn violation(invariant: &'static str, index: usize, detail: impl Into<String>) -> Self {
        HglError::InvariantViolation {
            invariant,
            index,
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HglError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HglError>;
