//! `fnls`: batch front end for the fractional NLS spectral laboratory.

mod commands;
mod config;
mod exit;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fnls_core::Sign;

use crate::config::FileConfig;
use crate::exit::{CliError, CliResult, Verdict};

#[derive(Parser, Debug)]
#[command(name = "fnls", version, about = "Spectral laboratory for the cubic fractional NLS on the torus")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON file of parameters; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exhaustive lattice scans: phase lower bound, double mean value bound, partial sums, divisor bound.
    Verify(commands::verify::VerifyArgs),
    /// Integrate the truncated gauged flow and report conservation drifts.
    Simulate(commands::simulate::SimulateArgs),
    /// Energy-estimate ratios and the four-term derivative decomposition over an ensemble.
    Energy(commands::energy::EnergyArgs),
    /// Gaussian-measure experiments.
    Measure(commands::measure::MeasureArgs),
    /// Desk-scale summary of the main consistency checks.
    Report(commands::report::ReportArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignArg {
    Defocusing,
    Focusing,
    Linear,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Defocusing => Sign::Defocusing,
            SignArg::Focusing => Sign::Focusing,
            SignArg::Linear => Sign::Linear,
        }
    }
}

/// Everything a command needs besides its own flags.
pub struct Context {
    pub common: Common,
    pub file: FileConfig,
}

impl Context {
    pub fn seed(&self) -> CliResult<u64> {
        self.file.pick(self.common.seed, "seed", 0)
    }

    pub fn out(&self) -> CliResult<Option<PathBuf>> {
        self.file.pick_opt(self.common.out.clone(), "out")
    }
}

fn run(cli: Cli) -> CliResult<Verdict> {
    let file = FileConfig::load(cli.common.config.as_deref())?;
    let threads = file.pick(cli.common.threads, "threads", 1)?;
    if threads == 0 {
        return Err(exit::invalid("--threads must be >= 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))?;
    let ctx = Context {
        common: cli.common,
        file,
    };
    match cli.command {
        Command::Verify(a) => commands::verify::run(&ctx, a),
        Command::Simulate(a) => commands::simulate::run(&ctx, a),
        Command::Energy(a) => commands::energy::run(&ctx, a),
        Command::Measure(a) => commands::measure::run(&ctx, a),
        Command::Report(a) => commands::report::run(&ctx, a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => ExitCode::from(v.exit_code() as u8),
        Err(e) => {
            eprintln!("fnls: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
