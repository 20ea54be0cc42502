//! `stabmetro`: analyze graph-state probes, search protocols, check them
//! against the dense oracle, and run the subspace and noise experiments.

mod cmd;
mod input;
mod output;
mod presets;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stabmetro::MetroError;

#[derive(Parser)]
#[command(name = "stabmetro", version, about = "Graph-state metrology protocols and their checks")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Debug)]
pub struct GlobalOpts {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest qubit count for pure-state oracle runs.
    #[arg(long, global = true, default_value_t = 16)]
    pub oracle_limit: usize,
    /// Largest qubit count for density-matrix oracle runs.
    #[arg(long, global = true, default_value_t = 10)]
    pub mixed_limit: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Twins structure, leaves, roots and the QFI upper bound of a graph.
    Analyze(cmd::analyze::Args),
    /// Best stabilizer protocol for a graph (or the one for a given α).
    Search(cmd::search::Args),
    /// Dense-oracle QFI/CFI sweep and the four saturation conditions.
    Verify(cmd::verify::Args),
    /// Subspace QFI, extremes and tolerance for a block partition.
    Protocol2(cmd::protocol2::Args),
    /// QFI under dephasing across a grid of noise strengths and sizes.
    Noise(cmd::noise::Args),
    /// Build an A- or B-type composite and run scaling fits.
    Construct(cmd::construct::Args),
}

#[derive(Debug)]
pub enum CliError {
    Metro(MetroError),
    Input(String),
}

impl From<MetroError> for CliError {
    fn from(e: MetroError) -> Self {
        CliError::Metro(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Metro(e) => write!(f, "{e}"),
            CliError::Input(s) => write!(f, "{s}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Metro(e) => e.exit_code() as u8,
            CliError::Input(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn run(cli: &Cli) -> CliResult<output::Report> {
    let g = &cli.global;
    match &cli.command {
        Command::Analyze(a) => cmd::analyze::run(a, g),
        Command::Search(a) => cmd::search::run(a, g),
        Command::Verify(a) => cmd::verify::run(a, g),
        Command::Protocol2(a) => cmd::protocol2::run(a, g),
        Command::Noise(a) => cmd::noise::run(a, g),
        Command::Construct(a) => cmd::construct::run(a, g),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(e) = report.emit(&cli.global) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match &report.failure {
        Some(msg) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(3)
        }
        None => ExitCode::SUCCESS,
    }
}
