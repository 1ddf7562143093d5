//! `concernmap`: train concern classifiers, recover concern clusters from a
//! source tree, render them, and compare recoveries.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "concernmap", version, about = "Concern-oriented architecture recovery")]
struct Cli {
    /// TOML file with default settings; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for per-entity work (1 = sequential; default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train candidate classifiers on a labelled corpus and keep the best.
    Train(TrainArgs),
    /// Classify every file of a source tree and write the recovery.
    Recover(RecoverArgs),
    /// Render a recovery result as a Graphviz DOT directory tree.
    Viz(VizArgs),
    /// Print the MoJoFM similarity of a recovery to a ground truth.
    Mojofm(MojofmArgs),
    /// Report what changed between two recovery results.
    Diff(DiffArgs),
    /// Inspect or reset the affinity cache.
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Directory with one subdirectory of documents per concern.
    training_root: Option<PathBuf>,
    /// Where to write the model.
    #[arg(long, short)]
    out: PathBuf,
    /// Where to write the candidate report (default: `<out>.report.txt`).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Laplace smoothing.
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of candidate classifiers.
    #[arg(long)]
    candidates: Option<usize>,
    /// Fraction of documents held out to score each candidate.
    #[arg(long)]
    holdout: Option<f64>,
    /// First split seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct ScoringArgs {
    /// Trained model file.
    #[arg(long, short)]
    model: Option<PathBuf>,
    /// Entities whose affinities are all below this go to Unknown.
    #[arg(long)]
    threshold: Option<f64>,
    /// Weight used for the tree view: bytes, physical-sloc or logical-sloc.
    #[arg(long)]
    weight: Option<String>,
    /// Glob of files to include, relative to the corpus root (repeatable).
    #[arg(long)]
    include: Vec<String>,
    /// Glob of files to skip (repeatable).
    #[arg(long)]
    exclude: Vec<String>,
}

#[derive(Debug, Args)]
struct RecoverArgs {
    /// Root of the source tree.
    corpus_root: Option<PathBuf>,
    #[command(flatten)]
    scoring: ScoringArgs,
    /// Output directory.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Affinity cache file (default: `<out>/cache.tsv`).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Previous result to update incrementally (default: `<out>/result.txt`).
    #[arg(long)]
    previous: Option<PathBuf>,
    /// Ignore any previous result.
    #[arg(long)]
    full: bool,
    /// Re-classify cache hits and report disagreements.
    #[arg(long)]
    audit: bool,
}

#[derive(Debug, Args)]
struct VizArgs {
    /// Recovery result file.
    result: PathBuf,
    /// DOT output (default: `concerns.dot` next to the result).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Dependency list (`from<TAB>to` lines); required by `--detail`.
    #[arg(long)]
    deps: Option<PathBuf>,
    /// Render each entity with its size and dependencies.
    #[arg(long)]
    detail: bool,
    /// Weight measure (default: the one recorded in the result).
    #[arg(long)]
    weight: Option<String>,
    /// Drawing width in inches.
    #[arg(long, requires = "height")]
    width: Option<f64>,
    /// Drawing height in inches.
    #[arg(long, requires = "width")]
    height: Option<f64>,
    /// File with one `#RRGGBB` color per line, in concern order.
    #[arg(long)]
    palette: Option<PathBuf>,
    /// Also render a PDF with Graphviz `dot` if it is installed.
    #[arg(long)]
    pdf: bool,
}

#[derive(Debug, Args)]
struct MojofmArgs {
    /// Recovery result file.
    result: PathBuf,
    /// Ground truth: a `cluster<TAB>path` roster or another result file.
    ground_truth: PathBuf,
}

#[derive(Debug, Args)]
struct DiffArgs {
    old: PathBuf,
    new: PathBuf,
}

#[derive(Debug, Subcommand)]
enum CacheCommand {
    /// Re-classify a corpus against the cache and report disagreements.
    Audit(CacheAuditArgs),
    /// Remove cache entries.
    Clear(CacheClearArgs),
}

#[derive(Debug, Args)]
struct CacheAuditArgs {
    corpus_root: Option<PathBuf>,
    #[command(flatten)]
    scoring: ScoringArgs,
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CacheClearArgs {
    #[arg(long)]
    cache: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
