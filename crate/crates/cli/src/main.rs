//! `coughdet`: command-line front end for the cough detection pipeline.
//!
//! Exit codes: 0 success, 2 input error (bad arguments, unreadable or
//! malformed files, missing upstream artifacts), 3 internal failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cough_core::evaluation::PartitionScheme;
use cough_core::pipeline::TrainMode;
use cough_core::representation::RepresentationKind;

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "coughdet", version, about = "Cough event detection from audio recordings")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// TOML pipeline configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 uses every core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Root for artifacts with relative configured paths.
    #[arg(long, global = true, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the synthetic three-scenario corpus.
    Synth {
        /// Destination directory [default: <output-dir>/corpus].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract short-term features for every manifest entry.
    Extract {
        /// Manifest CSV [default: <output-dir>/corpus/manifest.csv].
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Also write a CSV copy of each feature table.
        #[arg(long)]
        csv: bool,
    },
    /// Select the feature subset from extracted features.
    Select,
    /// Train detectors on all extracted recordings.
    Train {
        /// ensemble, per-part or single.
        #[arg(long)]
        mode: Option<TrainMode>,
        /// avgsd or boaw.
        #[arg(long)]
        representation: Option<RepresentationKind>,
    },
    /// Label the long-term groups of WAV files or feature tables.
    Predict {
        /// Detector file [default: <output-dir>/models/<mode>.cdet].
        #[arg(long)]
        model: Option<PathBuf>,
        /// WAV files, feature tables (.cft, .csv) or directories of tables
        /// [default: the extracted features].
        inputs: Vec<PathBuf>,
    },
    /// Cross-validate the configured training modes.
    Evaluate {
        /// block5 or lopo.
        #[arg(long)]
        scheme: Option<PartitionScheme>,
        /// avgsd or boaw.
        #[arg(long)]
        representation: Option<RepresentationKind>,
        /// Training modes to compare, comma separated.
        #[arg(long, value_delimiter = ',')]
        modes: Vec<TrainMode>,
        /// Extra long-term strides dropped from training around each test block.
        #[arg(long)]
        guard_groups: Option<usize>,
    },
    /// Print the effective configuration as TOML.
    Config,
}

/// A failure with its exit-code class.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Internal(String),
}

impl From<cough_core::Error> for Failure {
    fn from(e: cough_core::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .format_target(false)
        .init();
    let cli = Cli::parse();
    let jobs = cli.global.jobs;
    match cough_core::par::with_threads(jobs, || commands::run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
