mod cache;
mod commands;
mod config;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};

/// A failed run, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    Invariant(String),
    Usage(String),
    Budget(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invariant(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Io(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invariant(m) => write!(f, "invariant violated: {m}"),
            Failure::Usage(m) | Failure::Budget(m) | Failure::Io(m) => f.write_str(m),
        }
    }
}

impl From<midgraph::Error> for Failure {
    fn from(e: midgraph::Error) -> Failure {
        use midgraph::Error as E;
        let msg = e.to_string();
        match e {
            E::BudgetExceeded { .. } => Failure::Budget(msg),
            E::Io(_) => Failure::Io(msg),
            E::CertificateRejected(_) | E::Disconnected { .. } | E::NotConical(_) => Failure::Invariant(msg),
            _ => Failure::Usage(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Failure {
        Failure::Io(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Failure {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::resolve(&cli.flags)
        .map_err(Failure::Usage)
        .and_then(|cfg| commands::run(&cli.command, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
