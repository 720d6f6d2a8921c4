use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use galilei_cli::{
    exit_code, run_suite, tolerances::parse_cli_pairs, verify_file, ConfigError, Kind, RunReport, Suite, EXIT_CONFIG,
};

/// Verifies Galilei-algebra relations on exact and truncated realizations.
#[derive(Parser)]
#[command(name = "galilei", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file of the given kind.
    Verify {
        kind: Kind,
        scenario: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tolerance override, e.g. `--tol ccr=1e-11` (repeatable).
        #[arg(long = "tol", value_name = "KEY=VALUE")]
        tol: Vec<String>,
    },
    /// Run a built-in suite.
    Suite {
        name: Suite,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "tol", value_name = "KEY=VALUE")]
        tol: Vec<String>,
    },
}

const THREADS_VAR: &str = "GALILEI_THREADS";

fn configure_threads() -> Result<(), ConfigError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| ConfigError::at(THREADS_VAR, format!("expected a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| ConfigError::at(THREADS_VAR, e))
}

fn emit(report: &RunReport, out: Option<&PathBuf>) -> Result<(), ConfigError> {
    let text = report.to_json();
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| ConfigError::at(path.display().to_string(), e)),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
            r => r.map_err(|e| ConfigError::at("stdout", e)),
        },
    }
}

fn run(cli: Cli) -> Result<i32, ConfigError> {
    configure_threads()?;
    let (report, out) = match &cli.command {
        Command::Verify { kind, scenario, out, tol } => {
            (verify_file(scenario, Some(*kind), &parse_cli_pairs(tol)?)?, out.as_ref())
        }
        Command::Suite { name, out, tol } => (run_suite(*name, &parse_cli_pairs(tol)?)?, out.as_ref()),
    };
    emit(&report, out)?;
    for c in report.failing() {
        eprintln!("FAIL {}: {}", c.name, c.details.first().map(String::as_str).unwrap_or("check failed"));
    }
    Ok(exit_code(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
