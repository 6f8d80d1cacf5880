mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;
use coexist_core::experiments::with_jobs;
use coexist_core::Error;

use args::{Cli, Command};

// 0 success, 2 validation, 3 budget or refusal, 4 I/O
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Contract(_) | Error::Parse(_) => 2,
        Error::Refused(_) | Error::Budget { .. } => 3,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => 4,
        Error::Numerical(_) => 1,
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(config::ConfigError::Io(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(4);
        }
        Err(config::ConfigError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::try_parse_from(argv).unwrap_or_else(|e| e.exit());
    let run = || match &cli.command {
        Command::Theory(a) => commands::theory(a),
        Command::Crossover(a) => commands::crossover(a),
        Command::Curve(a) => commands::curve(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Concentrate(a) => commands::concentrate(a),
        Command::Scenario(a) => commands::scenario(a),
    };
    match with_jobs(cli.jobs, run).and_then(|r| r) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
