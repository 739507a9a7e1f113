//! Command-line front end for the age-of-information library.
//!
//! Five subcommands: `analyze` (closed forms and the scheme advisor),
//! `simulate` (Monte Carlo against the closed form), `sweep` (CSV over
//! a parameter grid), `optimize` (integer blocklength search), and
//! `compare` (redundancy crossover). Inputs resolve as flags over
//! replay manifest over config file over defaults.
//!
//! Exit codes: 0 success, 1 rejected input, 2 runtime failure.

pub mod args;
pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod fmt;
pub mod manifest;

use args::{Cli, Command};
use clap::Parser;
use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful exits; everything else is
            // a usage error.
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut stdout = std::io::stdout().lock();
    let result = match &cli.command {
        Command::Analyze(a) => commands::analyze(a, &mut stdout),
        Command::Simulate(a) => commands::simulate(a, &mut stdout),
        Command::Sweep(a) => commands::sweep(a, &mut stdout),
        Command::Optimize(a) => commands::optimize(a, &mut stdout),
        Command::Compare(a) => commands::compare(a, &mut stdout),
    };
    let _ = stdout.flush();
    match result {
        Ok(()) | Err(error::CliError::Pipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
