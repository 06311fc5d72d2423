//! `speclat`: verification suites, coefficient calibration, continuum sweeps
//! and configuration generation for lattice spectral triples.
//!
//! Exit status is 0 when every check passes, 1 when a numerical check fails
//! and 2 for malformed input or I/O problems.

mod error;
mod output;
mod run;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use error::CliError;
use spec::{Command, RunSpec};

#[derive(Debug, Parser)]
#[command(name = "speclat", version, about = "Spectral action checks on periodic lattice gauge networks")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run spec; defaults are used for anything it leaves out.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output directory (overrides the run spec's `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed (overrides the run spec's `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Refuse tolerances looser than the defaults.
    #[arg(long)]
    strict: bool,
}

fn load_spec(cli: &Cli) -> Result<RunSpec, CliError> {
    let mut spec = match &cli.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
            RunSpec::parse(&text)?
        }
        None => RunSpec::defaults_for(cli.command),
    };
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    spec.strict |= cli.strict;
    Ok(spec)
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let Some(k) = threads else { return Ok(()) };
    if k == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?;
    Ok(())
}

fn execute(cli: &Cli) -> Result<run::Outcome, CliError> {
    let mut spec = load_spec(cli)?;
    spec.validate(cli.command)?;
    spec.command = Some(cli.command);
    configure_threads(cli.threads)?;
    let out = cli.out.clone().or_else(|| spec.out.clone().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("."));
    match cli.command {
        Command::Verify => run::verify(&spec, &out),
        Command::Calibrate => run::calibration(&spec, &out),
        Command::Continuum => run::continuum(&spec, &out),
        Command::Generate => run::generate(&spec, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match execute(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                println!("FAILED");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("speclat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
