mod benchmark;
mod config;
mod error;
mod generate;
mod learn;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hgl_core::io::read_hypergraph_json;
use hgl_core::{evaluate, Matching};

use config::{Method, RunConfig};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "hgl", version, about = "Learn hypergraphs from node signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic datasets, one directory per (regime, index).
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output root; defaults to `<out_dir>/datasets` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Datasets per regime; overrides `generate.count`.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Learn a hypergraph from one dataset.
    Learn {
        #[arg(long, value_enum)]
        method: Method,
        /// Dataset directory, or a signals CSV file.
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the learned weighted graph.
        #[arg(long)]
        save_graph: bool,
        /// The signals CSV has a header row.
        #[arg(long)]
        header: bool,
    },
    /// Score a learned hypergraph against a ground-truth one; prints JSON.
    Evaluate {
        learned: PathBuf,
        truth: PathBuf,
        #[arg(long, default_value = "exact")]
        matching: String,
        #[arg(long, default_value_t = 0.8)]
        threshold: f64,
    },
    /// Run every method on every dataset and tabulate the scores.
    Benchmark {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Existing dataset root; generated under `<out>/datasets` when omitted.
        #[arg(long)]
        datasets: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        matching: Option<String>,
    },
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn mkdir(p: &Path) -> CliResult<()> {
    std::fs::create_dir_all(p).map_err(|e| CliError::io(p, e))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate { config, out, seed, count } => {
            let cfg = load_config(config.as_deref(), seed)?;
            let out = out.unwrap_or_else(|| cfg.out_dir.join("datasets"));
            let summaries = generate::run(&cfg, &out, count.unwrap_or(cfg.generate.count))?;
            generate::print_summary(&summaries);
        }
        Command::Learn {
            method,
            dataset,
            config,
            out,
            save_graph,
            header,
        } => {
            let cfg = load_config(config.as_deref(), None)?;
            mkdir(&out)?;
            let r = learn::run(method, &dataset, header, &cfg, &out, save_graph).map_err(|e| CliError {
                msg: format!("{}: {}", method.name(), e.msg),
                ..e
            })?;
            println!("{}: {} hyperedges written to {}", method.name(), r.hypergraph.len(), out.display());
        }
        Command::Evaluate {
            learned,
            truth,
            matching,
            threshold,
        } => {
            let matching: Matching = matching.parse()?;
            let l = read_hypergraph_json(&learned)?;
            let t = read_hypergraph_json(&truth)?;
            let r = evaluate(&l, &t, matching, threshold)?;
            println!("{}", serde_json::to_string_pretty(&r).expect("result serializes"));
        }
        Command::Benchmark {
            config,
            datasets,
            out,
            seed,
            matching,
        } => {
            let mut cfg = load_config(config.as_deref(), seed)?;
            if let Some(m) = matching {
                cfg.metrics.matching = m.parse()?;
            }
            let out = out.unwrap_or_else(|| cfg.out_dir.clone());
            let root = match datasets {
                Some(d) => d,
                None => {
                    let d = out.join("datasets");
                    generate::print_summary(&generate::run(&cfg, &d, cfg.generate.count)?);
                    d
                }
            };
            let regimes = benchmark::discover(&root)?;
            let outcome = benchmark::run(&cfg, &regimes)?;
            benchmark::write_outputs(&out, &cfg, &regimes, &outcome)?;
            print!("{}", benchmark::summary_markdown(&cfg, &regimes, &outcome));
            let failed = outcome.records.iter().filter(|r| r.outcome.is_err()).count();
            if failed > 0 {
                eprintln!("{failed} of {} runs failed; see {}", outcome.records.len(), out.join(benchmark::RUNS_FILE).display());
            }
            if !benchmark::all_cells_ok(&outcome) {
                return Err(CliError::numeric("at least one (method, regime) cell has no successful run"));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
