//! `sdfclass`: reproducible signed-distance-function classification
//! workflows. Exit codes: 0 success, 1 usage error, 2 data/contract error.

mod cli;
mod config;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use sdfclass_core::SdfError;

use crate::cli::{Cli, Command};

/// CLI failures keep usage problems (exit 1) apart from data and contract
/// problems (exit 2).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(SdfError),
}

impl From<SdfError> for CliError {
    fn from(e: SdfError) -> Self {
        CliError::Data(e)
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".to_string()));
        }
        // Ignore the error from a pool that is already initialized (tests
        // drive dispatch repeatedly in one process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match &cli.command {
        Command::Gen(args) => run::gen(args),
        Command::Estimate(args) => run::estimate(args),
        Command::Train(args) => run::train(args),
        Command::Predict(args) => run::predict(args),
        Command::Cv(args) => run::cv(args),
        Command::Loocv(args) => run::run_loocv(args),
        Command::BenchLinear(args) => run::bench_linear(args),
        Command::BenchCheckerboard(args) => run::bench_checkerboard(args),
    }
}

fn main() -> ExitCode {
    let args = match config::effective_args(std::env::args_os().collect()) {
        Ok(args) => args,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
