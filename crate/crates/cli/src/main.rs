mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::Outcome;
use error::CliError;

/// Finite sections of band operators: limits, indicators and pseudospectra.
#[derive(Debug, Parser)]
#[command(name = "fsa", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// limsup of norms, inverse norms and condition numbers.
    Analyze(RunArgs),
    /// Pseudospectrum grids of the tail sections and of the indicators.
    Pseudo(RunArgs),
    /// Convergence verdicts over the residue classes of n.
    Converge(RunArgs),
    /// Which indicators put each λ into the ε-pseudospectrum.
    Pollution(RunArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// Experiment config (JSON), or a report written by an earlier run.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Spread grid cells and indicators over worker threads.
    #[arg(long)]
    pub parallel: bool,
    /// Replaces n_range.end.
    #[arg(long = "n-max")]
    pub n_max: Option<u64>,
    /// Replaces tol.
    #[arg(long)]
    pub tol: Option<f64>,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FSA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| CliError::Threads(raw.clone()))?;
    if n == 0 {
        return Err(CliError::Threads(raw));
    }
    // fails only if a pool exists already, which is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    init_threads()?;
    match cli.command {
        Command::Analyze(a) => commands::analyze(&a),
        Command::Pseudo(a) => commands::pseudo(&a),
        Command::Converge(a) => commands::converge(&a),
        Command::Pollution(a) => commands::pollution(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            // clap would exit with 2, which means instability here
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Unstable) => {
            eprintln!("fsa: instability detected; report written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("fsa: {e}");
            ExitCode::from(1)
        }
    }
}
