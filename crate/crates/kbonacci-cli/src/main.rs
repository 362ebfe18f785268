//! `kbonacci`: exact k-bonacci random-walk analysis from the command line.

mod cli;
mod commands;
mod config;
mod error;
mod report;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use commands::Outcome;
use config::{FileConfig, OutputFormat};
use error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.agree {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let format = match cli.format {
        Some(f) => f,
        None => match &cfg.output_format {
            Some(text) => OutputFormat::parse(text)?,
            None => OutputFormat::Table,
        },
    };
    match &cli.command {
        Command::Sequence(args) => commands::cmd_sequence(args, &cfg, format),
        Command::Walk(args) => commands::cmd_walk(args, &cfg, format),
        Command::Probs(args) => commands::cmd_probs(args, &cfg, format),
        Command::Dimension(args) => commands::cmd_dimension(args, &cfg, format),
        Command::Montecarlo(args) => commands::cmd_montecarlo(args, &cfg, format),
        Command::Verify => commands::cmd_verify(format),
    }
}
