//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use hgl_core::pipeline::{ClusteringConfig, CliqueConfig};
use hgl_core::{GenConfig, HGLConfig, LeidenConfig, Matching};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const ENV_OUT_DIR: &str = "HGL_OUT_DIR";
pub const ENV_SEED: &str = "HGL_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Global seed; dataset `i` is generated from a seed derived from it.
    pub seed: u64,
    pub out_dir: PathBuf,
    pub generate: GenerateConfig,
    pub hgl: HGLConfig,
    pub baselines: BaselineConfig,
    pub metrics: MetricsConfig,
    pub benchmark: BenchmarkConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            out_dir: PathBuf::from("runs"),
            generate: GenerateConfig::default(),
            hgl: HGLConfig::default(),
            baselines: BaselineConfig::default(),
            metrics: MetricsConfig::default(),
            benchmark: BenchmarkConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateConfig {
    /// Datasets per overlap regime.
    pub count: usize,
    /// Maximum overlapping rates, one regime each.
    pub regimes: Vec<f64>,
    /// Generator settings; `max_overlap` and `seed` are set per dataset.
    pub gen: GenConfig,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        GenerateConfig {
            count: 8,
            regimes: vec![0.0, 0.1, 0.25],
            gen: GenConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub clustering: ClusteringConfig,
    pub community: LeidenConfig,
    pub clique: CliqueConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    pub matching: Matching,
    pub jaccard_threshold: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            matching: Matching::Exact,
            jaccard_threshold: 0.8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Hgl,
    Clustering,
    Community,
    Clique,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Hgl => "hgl",
            Method::Clustering => "clustering",
            Method::Community => "community",
            Method::Clique => "clique",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub methods: Vec<Method>,
    /// Worker threads; 0 uses one per core.
    pub threads: usize,
    /// When either grid is non-empty, HGL runs once per (alpha, beta) pair.
    /// An empty grid falls back to the value in `[hgl.gl]`.
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            methods: vec![Method::Hgl, Method::Clustering, Method::Community, Method::Clique],
            threads: 0,
            alpha_grid: Vec::new(),
            beta_grid: Vec::new(),
        }
    }
}

impl RunConfig {
    /// Reads `path` if given, otherwise starts from defaults, then applies env overrides.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
                toml::from_str(&text).map_err(|e| CliError::validation(format!("config {}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        if let Ok(v) = std::env::var(ENV_OUT_DIR) {
            cfg.out_dir = PathBuf::from(v);
        }
        if let Ok(v) = std::env::var(ENV_SEED) {
            cfg.seed = v
                .trim()
                .parse()
                .map_err(|_| CliError::validation(format!("{ENV_SEED} must be an unsigned integer, got '{v}'")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let mut gen = self.generate.gen;
        for &r in &self.generate.regimes {
            gen.max_overlap = r;
            gen.validate()?;
        }
        self.hgl.validate()?;
        self.baselines.community.validate()?;
        if self.baselines.clique.min_size < 2 {
            return Err(CliError::validation("baselines.clique.min_size must be at least 2"));
        }
        if self.baselines.clustering.k == Some(0) {
            return Err(CliError::validation("baselines.clustering.k must be positive"));
        }
        if !(self.metrics.jaccard_threshold > 0.0 && self.metrics.jaccard_threshold <= 1.0) {
            return Err(CliError::validation("metrics.jaccard_threshold must lie in (0, 1]"));
        }
        if self.benchmark.methods.is_empty() {
            return Err(CliError::validation("benchmark.methods is empty"));
        }
        for &a in &self.benchmark.alpha_grid {
            let mut gl = self.hgl.gl;
            gl.alpha = a;
            gl.validate()?;
        }
        for &b in &self.benchmark.beta_grid {
            let mut gl = self.hgl.gl;
            gl.beta = b;
            gl.validate()?;
        }
        Ok(())
    }
}

/// Directory name of an overlap regime, e.g. `overlap_10` for 0.1.
pub fn regime_dir(rate: f64) -> String {
    let pct = rate * 100.0;
    if (pct - pct.round()).abs() < 1e-9 {
        format!("overlap_{}", pct.round() as u64)
    } else {
        format!("overlap_{pct}")
    }
}
