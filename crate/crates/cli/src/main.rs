//! `corelite`: lite-subset selection, contamination scanning and score
//! aggregation from the command line.
//!
//! Exit status: 0 on success, 1 for data errors, 2 for usage errors.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "corelite", version, about = "Benchmark lite-set selection, contamination scanning and score aggregation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a representative subset with k-center greedy.
    Select(SelectArgs),
    /// Mean-score gap between a full benchmark and a selected subset.
    Gap(GapArgs),
    /// Build a word n-gram index from a training text corpus.
    IndexText(IndexTextArgs),
    /// Scan benchmark text against a word n-gram index.
    ScanText(ScanTextArgs),
    /// Build an 8-gram index from training image-token sequences.
    IndexImage(IndexImageArgs),
    /// Scan benchmark image tokens against an image index.
    ScanImage(ScanImageArgs),
    /// Normalise scores to 0..100 and average them per model.
    Aggregate(AggregateArgs),
    /// Correlate full-set and lite-set scores per dataset.
    Correlate(CorrelateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OnOff {
    On,
    Off,
}

impl OnOff {
    pub fn is_on(self) -> bool {
        self == OnOff::On
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KeyModeArg {
    Exact,
    Hashed,
}

impl From<KeyModeArg> for corelite::decontam::KeyMode {
    fn from(m: KeyModeArg) -> Self {
        match m {
            KeyModeArg::Exact => corelite::decontam::KeyMode::Exact,
            KeyModeArg::Hashed => corelite::decontam::KeyMode::Hashed,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Pearson,
    Spearman,
}

#[derive(Args, Serialize)]
pub struct SelectArgs {
    /// Binary embedding matrix (EMB1).
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Row ids for --embeddings, one per line.
    #[arg(long)]
    pub ids: PathBuf,
    /// Second modality, concatenated after --embeddings.
    #[arg(long, requires = "text_ids")]
    pub text_embeddings: Option<PathBuf>,
    #[arg(long, requires = "text_embeddings")]
    pub text_ids: Option<PathBuf>,
    /// Subset size. Defaults to the lite size of --dataset.
    #[arg(long)]
    pub k: Option<usize>,
    /// Dataset name used to look up the default subset size.
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scale each modality's vectors to unit length before concatenation.
    #[arg(long, value_enum, default_value = "on")]
    pub normalize: OnOff,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct GapArgs {
    /// Per-instance score CSV; the dataset column holds the instance id.
    #[arg(long)]
    pub scores: PathBuf,
    /// Selection JSON written by `select`.
    #[arg(long)]
    pub selection: PathBuf,
    /// Only report this model.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct IndexTextArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, default_value_t = corelite::decontam::DEFAULT_N)]
    pub n: usize,
    /// n-grams seen more than this many times are treated as meaningless.
    #[arg(long, default_value_t = corelite::decontam::DEFAULT_FREQ_THRESHOLD)]
    pub freq_threshold: u64,
    #[arg(long, value_enum, default_value = "exact")]
    pub key_mode: KeyModeArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct ScanTextArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub bench: PathBuf,
    #[arg(long, default_value_t = corelite::decontam::DEFAULT_RATIO_THRESHOLD)]
    pub ratio_threshold: f64,
    /// Expected n-gram size; must match the index.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct IndexImageArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    pub key_mode: KeyModeArg,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct ScanImageArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub bench: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct AggregateArgs {
    #[arg(long)]
    pub scores: PathBuf,
    /// Per-dataset scales; datasets without one default to 0..100.
    #[arg(long)]
    pub scales: Option<PathBuf>,
    /// Weight datasets by instance count.
    #[arg(long, value_enum, default_value = "off")]
    pub weighted: OnOff,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub full: PathBuf,
    #[arg(long)]
    pub lite: PathBuf,
    #[arg(long, value_enum, default_value = "pearson")]
    pub method: MethodArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into())
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CORELITE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("CORELITE_THREADS must be a non-negative integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Data(e.into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Select(a) => commands::select(a),
        Command::Gap(a) => commands::gap(a),
        Command::IndexText(a) => commands::index_text(a),
        Command::ScanText(a) => commands::scan_text(a),
        Command::IndexImage(a) => commands::index_image(a),
        Command::ScanImage(a) => commands::scan_image(a),
        Command::Aggregate(a) => commands::aggregate(a),
        Command::Correlate(a) => commands::correlate(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
