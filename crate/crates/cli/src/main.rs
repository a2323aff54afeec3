//! Command-line front end for the FMO waveguide simulator.
//!
//! Exit codes: 0 success, 2 invalid config or input, 3 numerical rejection,
//! 4 I/O failure.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fmo_core::analysis::{Ellipse, Rect};

#[derive(Parser, Debug)]
#[command(
    name = "fmo",
    version,
    about = "Photonic simulation of FMO energy transport"
)]
struct Cli {
    /// Worker threads for Monte Carlo studies (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evolve one realization and write the amplitude trace.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Replay detunings from a noise CSV instead of drawing them.
        #[arg(long)]
        noise: Option<PathBuf>,
    },
    /// Monte Carlo sweep over the detuning amplitude.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Rerun a named study with its default parameters.
    Reproduce {
        /// Study id, e.g. fig4e or figS8.
        figure: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override the study's number of realizations.
        #[arg(long)]
        realizations: Option<usize>,
    },
    /// Transport efficiency from a camera intensity matrix.
    AnalyzeImage {
        /// Whitespace-separated pixel matrix, one row per line.
        image: PathBuf,
        /// FMO region as cx,cy,rx,ry in pixels (x = column).
        #[arg(long)]
        ellipse: Ellipse,
        /// Sink region as x,y,w,h in pixels.
        #[arg(long)]
        rect: Rect,
        #[arg(long, default_value_t = 0.0)]
        background: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Variance, ACF, periodogram and reorganization energy of a noise CSV.
    AnalyzeNoise {
        noise: PathBuf,
        /// Sampling frequency in mm^-1.
        #[arg(long, default_value_t = 1.0)]
        sampling_frequency: f64,
        #[arg(long, default_value_t = fmo_core::analysis::DEFAULT_NFFT)]
        nfft: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Waveguide spacings and writing-speed schedule for fabrication.
    ChipPlan {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// JSON run file; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed in the run file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "rejected: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<fmo_core::Error> for CliError {
    fn from(e: fmo_core::Error) -> Self {
        use fmo_core::Error as E;
        let msg = e.to_string();
        match e {
            E::Io(_) => CliError::Io(msg),
            E::Csv(ref c) if matches!(c.kind(), csv::ErrorKind::Io(_)) => CliError::Io(msg),
            E::Csv(_)
            | E::Json(_)
            | E::Parse { .. }
            | E::InvalidParameter { .. }
            | E::Empty(_)
            | E::MaskOutOfBounds(_)
            | E::OverlappingMasks { .. } => CliError::Config(msg),
            _ => CliError::Numeric(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    let result = fmo_core::experiments::with_threads(threads, move || commands::run(cli.command))
        .map_err(CliError::from)
        .and_then(|r| r);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
