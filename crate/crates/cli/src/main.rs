//! `sensorfuse`: synthesize, explore, train, evaluate, filter, and
//! compare multi-sensor activity recognition pipelines from the
//! command line.
//!
//! Exit codes: 0 success, 1 input error, 2 training or numerical
//! error, 3 configuration error.

mod args;
mod commands;
mod config;
mod error;
mod io;
mod pipeline;
mod report;
mod svg;

use clap::error::ErrorKind;
use clap::Parser;

use crate::error::{CliError, EXIT_CONFIG};

fn main() {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are successful exits; anything
            // else is a configuration mistake.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(cli: args::Cli) -> Result<(), CliError> {
    match cli.command {
        args::Command::Synth(ref cmd) => {
            let config = config::resolve_synth(cmd)?;
            commands::synth::run(&config)
        }
        args::Command::Explore(ref cmd) => {
            let config = config::resolve_explore(cmd)?;
            commands::explore::run(&config)
        }
        args::Command::Train(ref cmd) => {
            let config = config::resolve_train(cmd)?;
            commands::train::run(&config)
        }
        args::Command::Eval(ref cmd) => {
            let config = config::resolve_eval(cmd)?;
            commands::eval::run(&config, &cmd.model_file, cmd.split)
        }
        args::Command::Kalman(ref cmd) => {
            let config = config::resolve_kalman(cmd)?;
            commands::kalman::run(&config)
        }
        args::Command::Compare(ref cmd) => {
            let config = config::resolve_compare(cmd)?;
            commands::compare::run(&config)
        }
    }
}
