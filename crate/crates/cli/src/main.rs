//! `thermoedge`: train a small MLP edge detector and account for the
//! information it irreversibly erases, in multiples of kT ln 2.
//!
//! Subcommands: `train`, `analyze`, `compare`, `synth`, `canny`. Shared
//! flags can also come from `THERMOEDGE_*` environment variables; a JSON
//! config (`--config`) supplies everything else. Exit codes: 0 on success,
//! 2 for configuration/usage problems, 3 for data or runtime failures.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod manifest;

use config::Overrides;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config files, manifests: exit code 2.
    Config(String),
    /// Unreadable inputs, failed runs: exit code 3.
    Data(String),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError::Data(message.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(message) => write!(f, "config error: {message}"),
            CliError::Data(message) => write!(f, "error: {message}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "thermoedge",
    version,
    about = "MLP edge detection with Landauer dissipation accounting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Run seed driving init, shuffling and splitting.
    #[arg(long, env = "THERMOEDGE_SEED")]
    seed: Option<u64>,

    /// JSON run configuration; explicit flags override its fields.
    #[arg(long, env = "THERMOEDGE_CONFIG")]
    config: Option<PathBuf>,

    /// Uniform bins per hidden neuron in the quantization scheme.
    #[arg(long, env = "THERMOEDGE_SCHEME_BINS")]
    scheme_bins: Option<usize>,

    /// Temperature in kelvin for the joules conversion.
    #[arg(long, env = "THERMOEDGE_TEMPERATURE")]
    temperature: Option<f64>,

    /// train: max training epochs; analyze/synth: ledger length.
    #[arg(long, env = "THERMOEDGE_EPOCHS")]
    epochs: Option<usize>,

    /// Directory for emitted reports.
    #[arg(long, env = "THERMOEDGE_OUT_DIR", default_value = "out")]
    out_dir: PathBuf,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            scheme_bins: self.scheme_bins,
            temperature: self.temperature,
            epochs: self.epochs,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train on a dataset manifest; writes checkpoint, curve CSV and config.
    Train {
        #[command(flatten)]
        common: CommonArgs,
        /// Dataset manifest CSV (image_id,path,gt_path,role).
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Replay a checkpoint's epochs into a dissipation ledger and summary.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// Checkpoint written by `train`.
        #[arg(long)]
        checkpoint: PathBuf,
        /// Analyze the training patches of this manifest.
        #[arg(long, conflicts_with = "synth")]
        manifest: Option<PathBuf>,
        /// Analyze the patches of a synthetic preset instead.
        #[arg(long)]
        synth: Option<String>,
    },
    /// Compare a measured bound against the published reference bounds.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
        /// Measured bits to compare.
        #[arg(long, conflicts_with = "summary")]
        bits: Option<f64>,
        /// Pull the task-level bits out of an analysis summary JSON.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Train on each synthetic preset and rank them by cumulative erasure.
    Synth {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated preset names.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "merged,separated,random1,random2,random3"
        )]
        presets: Vec<String>,
    },
    /// Classical Canny edge detection on a PGM/PBM image.
    Canny {
        /// Input image (PGM P2/P5 or PBM P1/P4).
        #[arg(long)]
        input: PathBuf,
        /// Output edge map; extension picks the format (.pgm or .pbm).
        #[arg(long)]
        output: PathBuf,
        /// Gaussian blur sigma.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Low threshold as a fraction of the max gradient magnitude.
        #[arg(long, default_value_t = 0.1)]
        low: f64,
        /// High threshold as a fraction of the max gradient magnitude.
        #[arg(long, default_value_t = 0.2)]
        high: f64,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train { common, manifest } => {
            let config = config::resolve(common.config.as_deref(), &common.overrides(), false)?;
            commands::train::run(&config, &manifest, &common.out_dir)
        }
        Command::Analyze {
            common,
            checkpoint,
            manifest,
            synth,
        } => {
            let config = config::resolve(common.config.as_deref(), &common.overrides(), true)?;
            commands::analyze::run(
                &config,
                &checkpoint,
                manifest.as_deref(),
                synth.as_deref(),
                &common.out_dir,
            )
        }
        Command::Compare {
            common,
            bits,
            summary,
        } => {
            let config = config::resolve(common.config.as_deref(), &common.overrides(), true)?;
            commands::compare::run(&config, bits, summary.as_deref(), &common.out_dir)
        }
        Command::Synth { common, presets } => {
            let config = config::resolve(common.config.as_deref(), &common.overrides(), true)?;
            commands::synth::run(&config, &presets, &common.out_dir)
        }
        Command::Canny {
            input,
            output,
            sigma,
            low,
            high,
        } => commands::canny::run(&input, &output, sigma, low, high),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error @ CliError::Config(_)) => {
            eprintln!("{error}");
            ExitCode::from(2)
        }
        Err(error @ CliError::Data(_)) => {
            eprintln!("{error}");
            ExitCode::from(3)
        }
    }
}
