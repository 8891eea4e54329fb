//! `entroseal`: encrypt and decrypt files, derive parameters, run the
//! verification suites and the key-expansion benchmark.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { code, message }) => {
            eprintln!("entroseal: {message}");
            ExitCode::from(code)
        }
    }
}
