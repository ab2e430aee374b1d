mod args;
mod commands;
mod config;
mod error;
mod inputs;
mod report;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::exit;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Detect(a) => commands::detect::run(&cli.global, a),
        Command::Denoise(a) => commands::denoise::run(&cli.global, a),
        Command::Synth(a) => commands::synth::run(&cli.global, a),
        Command::Bench(a) => commands::bench::run(&cli.global, a),
        Command::Metrics(a) => commands::metrics::run(&cli.global, a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("speckle: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
