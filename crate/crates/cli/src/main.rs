//! `divcurve`: diversity curves for graph datasets from the command line.

mod commands;
mod config;
mod error;
mod files;

use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};

use commands::{Analysis, CurveArgs, CurveFormat};
use config::{KindArg, RunConfig, Threads};
use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "divcurve", version, about = "Diversity curves for graphs")]
struct Cli {
    /// Worker threads: a count or `auto`.
    #[arg(long, global = true, env = "DIVCURVE_THREADS", default_value = "auto")]
    threads: Threads,

    /// Log more (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(flatten)]
    config: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random graph dataset from a JSON manifest.
    Generate {
        #[arg(long)]
        manifest: PathBuf,
        /// Output JSONL; a `.manifest.json` sidecar is written next to it.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the manifest seed.
        #[arg(long = "manifest-seed")]
        manifest_seed: Option<u64>,
    },
    /// Compute one diversity curve per graph or triangulation.
    Curve {
        /// JSONL dataset, or a single edge list.
        #[arg(long, conflicts_with = "triangulations")]
        dataset: Option<PathBuf>,
        /// JSONL triangulations (`{"n", "triangles"}` per line).
        #[arg(long)]
        triangulations: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CurveFormat::Csv)]
        format: CurveFormat,
        /// Write each graph's distance table as CSV into this directory.
        #[arg(long)]
        dump_distances: Option<PathBuf>,
        /// Write every coarsened graph as JSONL to this file.
        #[arg(long)]
        dump_coarse: Option<PathBuf>,
    },
    /// Analyses over curves and datasets.
    Analyze {
        #[command(subcommand)]
        what: AnalyzeCommand,
        /// CSV output for `dist` and `sweep` (stdout when absent for `dist`).
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum AnalyzeCommand {
    /// Pairwise curve distance matrix.
    Dist {
        #[arg(long)]
        curves: PathBuf,
    },
    /// Two-sample permutation test between two curve files.
    Permtest {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Cross-validated kNN accuracy with labels from the dataset.
    Knn {
        #[arg(long)]
        curves: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Keep graphs of equal size in the same fold.
        #[arg(long)]
        group_by_size: bool,
    },
    /// Mean silhouette of the dataset labels under the curve distance.
    Silhouette {
        #[arg(long)]
        curves: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
    },
    /// Rank correlation of two columns of a CSV table.
    Spearman {
        #[arg(long)]
        input: PathBuf,
        /// Column name [default: second to last].
        #[arg(long)]
        x: Option<String>,
        /// Column name [default: last].
        #[arg(long)]
        y: Option<String>,
    },
    /// Whether spread and one-edge curves tell two graphs apart.
    Distinguish {
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Mean curve norm against perturbation degree.
    Sweep {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Comma-separated degrees in [0, 1].
        #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")]
        degrees: String,
    },
}

impl From<AnalyzeCommand> for Analysis {
    fn from(c: AnalyzeCommand) -> Self {
        match c {
            AnalyzeCommand::Dist { curves } => Analysis::Dist { curves },
            AnalyzeCommand::Permtest { a, b } => Analysis::Permtest { a, b },
            AnalyzeCommand::Knn {
                curves,
                dataset,
                k,
                folds,
                group_by_size,
            } => Analysis::Knn {
                curves,
                dataset,
                k,
                folds,
                group_by_size,
            },
            AnalyzeCommand::Silhouette { curves, dataset } => Analysis::Silhouette { curves, dataset },
            AnalyzeCommand::Spearman { input, x, y } => Analysis::Spearman { input, x, y },
            AnalyzeCommand::Distinguish { g, h } => Analysis::Distinguish { g, h },
            AnalyzeCommand::Sweep { dataset, kind, degrees } => Analysis::Sweep { dataset, kind, degrees },
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Threads::Count(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Generate {
            manifest,
            out,
            manifest_seed,
        } => commands::generate(&manifest, &out, manifest_seed),
        Command::Curve {
            dataset,
            triangulations,
            out,
            format,
            dump_distances,
            dump_coarse,
        } => commands::curve(
            &cli.config,
            &CurveArgs {
                dataset: dataset.as_deref(),
                triangulations: triangulations.as_deref(),
                out: out.as_deref(),
                format,
                dump_distances: dump_distances.as_deref(),
                dump_coarse: dump_coarse.as_deref(),
            },
        ),
        Command::Analyze { what, out } => commands::analyze(&cli.config, &what.into(), out.as_deref()),
    }
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = run(cli) {
        eprintln!("divcurve: {e}");
        process::exit(e.exit_code());
    }
}
