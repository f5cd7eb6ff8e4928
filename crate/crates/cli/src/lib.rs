//! The `hybridtext` command line: split, train, evaluate, classify, compare
//! and synth.

pub mod commands;
pub mod config;
pub mod error;
pub mod model_file;
pub mod report;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use hybridtext::ModelKind;

pub use config::{RunConfig, TuningArgs};
pub use error::CliError;
pub use model_file::ModelFile;

#[derive(Debug, Parser)]
#[command(name = "hybridtext", version, about = "Naive Bayes, SVM and hybrid text classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorFlag {
    Train,
    Test,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindFlag {
    Nb,
    Svm,
    Hybrid,
}

impl From<KindFlag> for ModelKind {
    fn from(k: KindFlag) -> Self {
        match k {
            KindFlag::Nb => ModelKind::Nb,
            KindFlag::Svm => ModelKind::Svm,
            KindFlag::Hybrid => ModelKind::Hybrid,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stratified train/test split of a CSV file.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
        #[arg(long)]
        test_fraction: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Train a model and write it as a JSON model file.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "hybrid")]
        kind: KindFlag,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Timestamp recorded in the model metadata (seconds since the epoch).
        #[arg(long)]
        trained_at: Option<u64>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Evaluate a model on a labeled CSV file.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Class distribution used as the baseline for relative and
        /// information metrics.
        #[arg(long, value_enum, default_value = "train")]
        prior: PriorFlag,
        /// Add per-instance predictions.
        #[arg(long)]
        audit: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also write the JSON report to this path.
        #[arg(long)]
        report_out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Classify texts given inline or one per line in a file.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, conflicts_with = "input")]
        text: Vec<String>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// Append the member-model distributions to each line.
        #[arg(long)]
        audit: bool,
    },
    /// Train naive Bayes, SVM and the hybrid on one split and compare them.
    Compare {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        report_out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        tuning: TuningArgs,
    },
    /// Write the seeded synthetic comment corpus.
    Synth {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 600)]
        docs: usize,
        #[arg(long, default_value_t = 0.2)]
        overlap: f64,
        #[arg(long, default_value_t = 0.3)]
        cue_rate: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Run a parsed command, writing normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    commands::dispatch(cli.command, out)
}
