use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hgl_core::io::{self, Dataset};
use hgl_core::metrics::MeanStd;
use hgl_core::synthgen::DatasetMeta;
use hgl_core::{evaluate, EvalResult, HglError};
use rayon::prelude::*;

use crate::config::{Method, RunConfig};
use crate::error::{CliError, CliResult};
use crate::learn::run_method;

pub const RESULTS_FILE: &str = "results.csv";
pub const RUNS_FILE: &str = "runs.csv";
pub const SUMMARY_FILE: &str = "summary.md";
pub const METRICS: [&str; 3] = ["recall", "precision", "f1"];

pub struct Regime {
    pub name: String,
    pub max_overlap: Option<f64>,
    pub datasets: Vec<PathBuf>,
}

/// A method together with the configuration it runs under.
pub struct Variant {
    pub label: String,
    pub method: Method,
    pub cfg: RunConfig,
}

pub fn variants(cfg: &RunConfig) -> Vec<Variant> {
    let bc = &cfg.benchmark;
    let mut out = Vec::new();
    for &m in &bc.methods {
        if m == Method::Hgl && !(bc.alpha_grid.is_empty() && bc.beta_grid.is_empty()) {
            let alphas = if bc.alpha_grid.is_empty() { vec![cfg.hgl.gl.alpha] } else { bc.alpha_grid.clone() };
            let betas = if bc.beta_grid.is_empty() { vec![cfg.hgl.gl.beta] } else { bc.beta_grid.clone() };
            for &a in &alphas {
                for &b in &betas {
                    let mut c = cfg.clone();
                    c.hgl.gl.alpha = a;
                    c.hgl.gl.beta = b;
                    out.push(Variant {
                        label: format!("hgl[alpha={a},beta={b}]"),
                        method: m,
                        cfg: c,
                    });
                }
            }
        } else {
            out.push(Variant {
                label: m.name().to_string(),
                method: m,
                cfg: cfg.clone(),
            });
        }
    }
    out
}

fn is_dataset(dir: &Path) -> bool {
    dir.join(io::SIGNALS_FILE).is_file()
}

fn subdirs(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut out = Vec::new();
    for e in entries {
        let p = e.map_err(|e| CliError::io(dir, e))?.path();
        if p.is_dir() {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

fn dir_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn read_overlap(dataset: &Path) -> Option<f64> {
    let text = std::fs::read_to_string(dataset.join(io::META_FILE)).ok()?;
    let meta: DatasetMeta = serde_json::from_str(&text).ok()?;
    Some(meta.config.max_overlap)
}

/// Finds datasets as `root/<regime>/<dataset>/`. A root whose children are datasets
/// is one regime, and a root that is itself a dataset is a regime of one.
pub fn discover(root: &Path) -> CliResult<Vec<Regime>> {
    let regime = |name: String, datasets: Vec<PathBuf>| Regime {
        name,
        max_overlap: datasets.first().and_then(|d| read_overlap(d)),
        datasets,
    };
    if !root.is_dir() {
        return Err(CliError::io(root, std::io::Error::new(std::io::ErrorKind::NotFound, "dataset directory not found")));
    }
    if is_dataset(root) {
        return Ok(vec![regime(dir_name(root), vec![root.to_path_buf()])]);
    }
    let children = subdirs(root)?;
    let direct: Vec<PathBuf> = children.iter().filter(|d| is_dataset(d)).cloned().collect();
    let mut regimes = Vec::new();
    if !direct.is_empty() {
        regimes.push(regime(dir_name(root), direct));
    } else {
        for c in &children {
            let ds: Vec<PathBuf> = subdirs(c)?.into_iter().filter(|d| is_dataset(d)).collect();
            if !ds.is_empty() {
                regimes.push(regime(dir_name(c), ds));
            }
        }
    }
    if regimes.is_empty() {
        return Err(CliError::io(root, std::io::Error::new(std::io::ErrorKind::NotFound, "no datasets found")));
    }
    regimes.sort_by(|a, b| {
        let key = |r: &Regime| r.max_overlap.unwrap_or(f64::INFINITY);
        key(a).total_cmp(&key(b)).then_with(|| a.name.cmp(&b.name))
    });
    Ok(regimes)
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub regime: usize,
    pub dataset: usize,
    pub variant: usize,
    pub outcome: Result<(EvalResult, usize), String>,
    pub time_ms: f64,
}

fn run_one(v: &Variant, data: &CliResult<Dataset>) -> Result<(EvalResult, usize), String> {
    let data = data.as_ref().map_err(|e| format!("load: {e}"))?;
    let truth = data.truth.as_ref().ok_or("dataset has no ground-truth hypergraph")?;
    let r = run_method(v.method, &data.signals, Some(truth), &v.cfg).map_err(|e| e.to_string())?;
    let m = &v.cfg.metrics;
    let e = evaluate(&r.hypergraph, truth, m.matching, m.jaccard_threshold).map_err(|e: HglError| e.to_string())?;
    Ok((e, r.hypergraph.len()))
}

pub struct Outcome {
    pub records: Vec<RunRecord>,
    /// `cells[v][r]` holds the metric summaries, `None` when every run failed.
    pub cells: Vec<Vec<Option<[MeanStd; 3]>>>,
    pub ok_counts: Vec<Vec<(usize, usize)>>,
}

pub fn run(cfg: &RunConfig, regimes: &[Regime]) -> CliResult<Outcome> {
    let vs = variants(cfg);
    let loaded: Vec<Vec<CliResult<Dataset>>> = regimes
        .iter()
        .map(|r| r.datasets.iter().map(|d| io::load_dataset(d).map_err(CliError::from)).collect())
        .collect();
    let mut jobs = Vec::new();
    for (ri, r) in regimes.iter().enumerate() {
        for di in 0..r.datasets.len() {
            for vi in 0..vs.len() {
                jobs.push((ri, di, vi));
            }
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cfg.benchmark.threads > 0 {
        builder = builder.num_threads(cfg.benchmark.threads);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::validation(format!("thread pool: {e}")))?;
    let mut records: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(ri, di, vi)| {
                let t = Instant::now();
                let outcome = run_one(&vs[vi], &loaded[ri][di]);
                RunRecord {
                    regime: ri,
                    dataset: di,
                    variant: vi,
                    outcome,
                    time_ms: t.elapsed().as_secs_f64() * 1e3,
                }
            })
            .collect()
    });
    records.sort_by_key(|r| (r.regime, r.variant, r.dataset));

    let mut cells = vec![vec![None; regimes.len()]; vs.len()];
    let mut ok_counts = vec![vec![(0, 0); regimes.len()]; vs.len()];
    for vi in 0..vs.len() {
        for ri in 0..regimes.len() {
            let evals: Vec<&EvalResult> = records
                .iter()
                .filter(|r| r.variant == vi && r.regime == ri)
                .filter_map(|r| r.outcome.as_ref().ok().map(|(e, _)| e))
                .collect();
            ok_counts[vi][ri] = (evals.len(), regimes[ri].datasets.len());
            let col = |f: fn(&EvalResult) -> f64| MeanStd::of(&evals.iter().map(|e| f(e)).collect::<Vec<_>>());
            if let (Ok(r), Ok(p), Ok(f)) = (col(|e| e.recall), col(|e| e.precision), col(|e| e.f1)) {
                cells[vi][ri] = Some([r, p, f]);
            }
        }
    }
    Ok(Outcome {
        records,
        cells,
        ok_counts,
    })
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::io(path, std::io::Error::other(e.to_string()))
}

pub fn write_outputs(out: &Path, cfg: &RunConfig, regimes: &[Regime], o: &Outcome) -> CliResult<()> {
    let vs = variants(cfg);
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;

    let path = out.join(RESULTS_FILE);
    let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
    w.write_record(["method", "regime", "metric", "mean", "std", "n_ok", "n_runs"])
        .map_err(csv_err(&path))?;
    for (vi, v) in vs.iter().enumerate() {
        for (ri, r) in regimes.iter().enumerate() {
            let (ok, total) = o.ok_counts[vi][ri];
            for (mi, metric) in METRICS.iter().enumerate() {
                let (mean, std) = match &o.cells[vi][ri] {
                    Some(c) => (format!("{}", c[mi].mean), format!("{}", c[mi].std)),
                    None => ("NaN".into(), "NaN".into()),
                };
                w.write_record([&v.label, &r.name, *metric, &mean, &std, &ok.to_string(), &total.to_string()])
                    .map_err(csv_err(&path))?;
            }
        }
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    let path = out.join(RUNS_FILE);
    let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
    w.write_record(["method", "regime", "dataset", "status", "recall", "precision", "f1", "hyperedges", "time_ms", "error"])
        .map_err(csv_err(&path))?;
    for rec in &o.records {
        let ds = dir_name(&regimes[rec.regime].datasets[rec.dataset]);
        let head = [vs[rec.variant].label.clone(), regimes[rec.regime].name.clone(), ds];
        let tail = match &rec.outcome {
            Ok((e, n)) => [
                "ok".into(),
                e.recall.to_string(),
                e.precision.to_string(),
                e.f1.to_string(),
                n.to_string(),
                format!("{:.3}", rec.time_ms),
                String::new(),
            ],
            Err(msg) => [
                "failed".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("{:.3}", rec.time_ms),
                msg.clone(),
            ],
        };
        w.write_record(head.iter().chain(tail.iter())).map_err(csv_err(&path))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;

    let path = out.join(SUMMARY_FILE);
    std::fs::write(&path, summary_markdown(cfg, regimes, o)).map_err(|e| CliError::io(&path, e))
}

pub fn summary_markdown(cfg: &RunConfig, regimes: &[Regime], o: &Outcome) -> String {
    let vs = variants(cfg);
    let mut s = String::new();
    let matching = match cfg.metrics.matching {
        hgl_core::Matching::Exact => "exact".to_string(),
        hgl_core::Matching::Jaccard => format!("jaccard >= {}", cfg.metrics.jaccard_threshold),
    };
    let _ = writeln!(s, "# Benchmark summary\n");
    let _ = writeln!(s, "Matching: {matching}. Seed: {}. Values are mean±std over datasets.\n", cfg.seed);
    for (ri, r) in regimes.iter().enumerate() {
        let title = match r.max_overlap {
            Some(x) => format!("{} (max overlap {x})", r.name),
            None => r.name.clone(),
        };
        let _ = writeln!(s, "## {title}\n");
        let _ = writeln!(s, "| Method | Recall | Precision | F1 | Runs ok |");
        let _ = writeln!(s, "|---|---|---|---|---|");
        for (vi, v) in vs.iter().enumerate() {
            let (ok, total) = o.ok_counts[vi][ri];
            let cols = match &o.cells[vi][ri] {
                Some([r, p, f]) => format!("{r} | {p} | {f}"),
                None => "n/a | n/a | n/a".into(),
            };
            let _ = writeln!(s, "| {} | {cols} | {ok}/{total} |", v.label);
        }
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "## F1 by regime\n");
    let _ = write!(s, "| Method |");
    for r in regimes {
        let _ = write!(s, " {} |", r.name);
    }
    let _ = write!(s, "\n|---|");
    for _ in regimes {
        let _ = write!(s, "---|");
    }
    let _ = writeln!(s);
    for (vi, v) in vs.iter().enumerate() {
        let _ = write!(s, "| {} |", v.label);
        for ri in 0..regimes.len() {
            match &o.cells[vi][ri] {
                Some(c) => {
                    let _ = write!(s, " {} |", c[2]);
                }
                None => {
                    let _ = write!(s, " n/a |");
                }
            }
        }
        let _ = writeln!(s);
    }
    s
}

/// True when every (method, regime) cell has at least one successful run.
pub fn all_cells_ok(o: &Outcome) -> bool {
    o.cells.iter().all(|row| row.iter().all(Option::is_some))
}
