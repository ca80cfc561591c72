//! `cfcomm`: run scenarios, transmit bitmaps, audit counterfactuality,
//! optimize the half mirror, simulate the phase lock and calibrate visibility.

mod args;
mod commands;
mod error;
mod report;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cfcomm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
