mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use chamber_core::ChamberError;
use clap::Parser;

use args::{Cli, Command};

/// Process exit statuses.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

pub enum Failure {
    /// A check ran and did not hold; the report is already on stdout.
    Verification,
    Error(ChamberError),
    Io(std::io::Error),
    Usage(String),
}

impl From<ChamberError> for Failure {
    fn from(e: ChamberError) -> Self {
        Failure::Error(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Io(e.into())
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CHAMBER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| Failure::Usage(format!("CHAMBER_THREADS must be a non-negative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let result = match cli.command {
        Command::Count(a) => commands::count(&a, &mut out),
        Command::Asym(a) => commands::asym(&a, &mut out),
        Command::Compare(a) => commands::compare(&a, &mut out),
        Command::Preset(a) => commands::preset(&a, &mut out),
        Command::Verify(a) => commands::verify(&a, &mut out),
    };
    out.flush()?;
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Verification) => EXIT_FAILED,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILED
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            match e {
                ChamberError::Resource { .. } => EXIT_RESOURCE,
                ChamberError::Degenerate(_) | ChamberError::Diagnostic(_) => EXIT_FAILED,
                _ => EXIT_USAGE,
            }
        }
    };
    ExitCode::from(code)
}
