//! Command-line front end over the `hyperent` library: tabulated
//! purification and concentration figures, cavity parity-check fidelities,
//! and reflection spectra.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Errors split by exit code: configuration and I/O problems exit 2,
/// physics-domain rejections exit 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Domain(hyperent::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<hyperent::Error> for CliError {
    fn from(e: hyperent::Error) -> Self {
        CliError::Domain(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

const LONG_ABOUT: &str = "\
Tables for hyperentanglement purification (epp), concentration (ecp),
cavity parity-check fidelities (qnd-fidelity), and reflection spectra
(reflection-sweep).

All rates and frequencies are in units of 2π×GHz. Output is CSV by default
(--format json for JSON), written to stdout or to --out FILE; a relative
--out path is resolved under $HYPERENT_OUT_DIR when that variable is set.
Parameters may also come from a flat `key = value` file via --config, with
explicit flags taking precedence.";

/// Purification and concentration figures for photon pairs entangled in
/// polarization and spatial mode.
#[derive(Parser)]
#[command(name = "hyperent", version, about, long_about = LONG_ABOUT)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Purification trajectory: per-round fidelities and cumulative yield.
    Epp(EppArgs),
    /// Concentration: per-round and cumulative success probabilities.
    Ecp(EcpArgs),
    /// Parity-check fidelities at one cavity operating point.
    QndFidelity(QndFidelityArgs),
    /// Reflection amplitudes across a probe-frequency sweep.
    ReflectionSweep(SweepArgs),
}

#[derive(Args)]
pub struct CommonArgs {
    /// Flat `key = value` parameter file; explicit flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Output encoding: csv (default) or json.
    #[arg(long, value_name = "FMT")]
    pub format: Option<String>,
    /// Monte Carlo shots; 0 selects the exact analytic route [default: 0].
    #[arg(long)]
    pub shots: Option<u64>,
    /// Random seed; required whenever shots > 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args)]
pub struct EppArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Initial polarization fidelity; omitting it runs the grid
    /// 0.6, 0.7, 0.8, 0.9.
    #[arg(long, allow_negative_numbers = true)]
    pub f1: Option<f64>,
    /// Initial spatial-mode fidelity [default: the f1 value].
    #[arg(long, allow_negative_numbers = true)]
    pub f2: Option<f64>,
    /// Purification rounds to iterate [default: 5].
    #[arg(long)]
    pub rounds: Option<usize>,
}

#[derive(Args)]
pub struct EcpArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Initial weight 2α² of the favored component, shared by both degrees
    /// of freedom; omitting it sweeps 0.1, 0.2, …, 1.0.
    #[arg(long, allow_negative_numbers = true)]
    pub two_alpha_sq: Option<f64>,
    /// Concentration rounds to expand [default: 5].
    #[arg(long)]
    pub rounds: Option<usize>,
}

#[derive(Args)]
pub struct QndFidelityArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Spin-cavity coupling strength [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Cavity side-leakage rate [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Cavity damping into the input-output mode [default: 10].
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Spin dipole decay rate [default: 0.015].
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
}

#[derive(Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Spin-cavity coupling strength [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Cavity side-leakage rate [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    /// Cavity damping into the input-output mode [default: 10].
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// Spin dipole decay rate [default: 0.015].
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Lowest probe frequency of the sweep [default: -5].
    #[arg(long, allow_negative_numbers = true)]
    pub omega_min: Option<f64>,
    /// Highest probe frequency of the sweep [default: 5].
    #[arg(long, allow_negative_numbers = true)]
    pub omega_max: Option<f64>,
    /// Number of evenly spaced sample points [default: 101].
    #[arg(long)]
    pub points: Option<usize>,
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Epp(args) => commands::epp(&args),
        Command::Ecp(args) => commands::ecp(&args),
        Command::QndFidelity(args) => commands::qnd_fidelity(&args),
        Command::ReflectionSweep(args) => commands::reflection_sweep(&args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
