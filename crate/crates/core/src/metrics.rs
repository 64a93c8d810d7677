//! Hyperedge recovery metrics.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{HglError, Result};
use crate::types::Hypergraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matching {
    /// A learned hyperedge matches only an identical truth hyperedge.
    Exact,
    /// Greedy one-to-one matching by Jaccard similarity above a threshold.
    Jaccard,
}

impl std::str::FromStr for Matching {
    type Err = HglError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Matching::Exact),
            "jaccard" => Ok(Matching::Jaccard),
            other => Err(HglError::InvalidConfig(format!("unknown matching mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub matching: Matching,
    /// Best Jaccard similarity of each truth hyperedge against any learned one.
    pub per_hyperedge_best_jaccard: Vec<f64>,
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn jaccard(a: &[usize], b: &[usize]) -> f64 {
    // both sorted ascending
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Compares a learned hypergraph against the ground truth.
pub fn evaluate(learned: &Hypergraph, truth: &Hypergraph, matching: Matching, jaccard_threshold: f64) -> Result<EvalResult> {
    if learned.n_nodes() != truth.n_nodes() {
        return Err(HglError::NodeCountMismatch {
            learned: learned.n_nodes(),
            truth: truth.n_nodes(),
        });
    }
    if !(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0) {
        return Err(HglError::InvalidConfig(format!(
            "jaccard threshold must lie in (0, 1], got {jaccard_threshold}"
        )));
    }
    let le = learned.hyperedges();
    let te = truth.hyperedges();

    let per_hyperedge_best_jaccard: Vec<f64> = te
        .iter()
        .map(|t| le.iter().map(|l| jaccard(l, t)).fold(0.0, f64::max))
        .collect();

    let matched = match matching {
        Matching::Exact => {
            // no duplicates on either side, so set membership is a one-to-one matching
            let truth_set: HashSet<&Vec<usize>> = te.iter().collect();
            le.iter().filter(|l| truth_set.contains(l)).count()
        }
        Matching::Jaccard => {
            let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
            for (i, l) in le.iter().enumerate() {
                for (j, t) in te.iter().enumerate() {
                    let s = jaccard(l, t);
                    if s >= jaccard_threshold {
                        pairs.push((s, i, j));
                    }
                }
            }
            pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
            let mut l_used = vec![false; le.len()];
            let mut t_used = vec![false; te.len()];
            let mut count = 0;
            for (_, i, j) in pairs {
                if !l_used[i] && !t_used[j] {
                    l_used[i] = true;
                    t_used[j] = true;
                    count += 1;
                }
            }
            count
        }
    };

    let recall = if te.is_empty() { 0.0 } else { matched as f64 / te.len() as f64 };
    let precision = if le.is_empty() { 0.0 } else { matched as f64 / le.len() as f64 };
    Ok(EvalResult {
        recall,
        precision,
        f1: f1_score(precision, recall),
        matching,
        per_hyperedge_best_jaccard,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation (divisor n).
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(HglError::EmptyList);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Ok(MeanStd { mean, std: var.sqrt() })
    }
}

impl std::fmt::Display for MeanStd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.2}±{:.2}", self.mean, self.std)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    pub recall: MeanStd,
    pub precision: MeanStd,
    pub f1: MeanStd,
}

pub fn aggregate(results: &[EvalResult]) -> Result<Aggregate> {
    let pick = |f: fn(&EvalResult) -> f64| results.iter().map(f).collect::<Vec<_>>();
    Ok(Aggregate {
        n: results.len(),
        recall: MeanStd::of(&pick(|r| r.recall))?,
        precision: MeanStd::of(&pick(|r| r.precision))?,
        f1: MeanStd::of(&pick(|r| r.f1))?,
    })
}
