//! `algpath`: certified homotopy continuation from the command line.
//!
//! Exit codes: 0 when every path (or the candidate) is certified, 1 on path
//! failures or a rejected candidate, 2 on usage and parse errors, 3 on I/O
//! errors.

mod bench;
mod config;
mod error;
mod paths;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => paths::solve(args),
        Command::Track(args) => paths::track(args),
        Command::Certify(args) => paths::certify(args),
        Command::Bench(args) => bench::bench(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
