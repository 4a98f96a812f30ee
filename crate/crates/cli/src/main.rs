mod args;
mod commands;
mod config;
mod exit;
mod selftest;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::RunConfig;
use exit::{CliError, Exit};

fn run(cli: &Cli) -> Result<commands::Output, CliError> {
    let cfg = RunConfig::resolve(&cli.common)?;
    match &cli.command {
        Command::Eval(a) => commands::eval(a, &cfg),
        Command::Check(a) => commands::check(a, &cfg),
        Command::Atlas(a) => commands::atlas_cmd(a, &cfg),
        Command::Selftest(a) => selftest::run(a.cases, &cfg),
        Command::Config => Ok(commands::Output { payload: cfg.to_config_string(), exit: Exit::Ok }),
    }
}

fn emit(cli: &Cli, payload: &str) -> Result<(), CliError> {
    match &cli.common.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| CliError::new(Exit::Validation, format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(payload.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::new(Exit::Validation, format!("cannot write output: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exit = match run(&cli).and_then(|out| emit(&cli, &out.payload).map(|_| out.exit)) {
        Ok(exit) => exit,
        Err(e) => {
            eprintln!("qbp: {e}");
            e.exit
        }
    };
    ExitCode::from(exit.code() as u8)
}
