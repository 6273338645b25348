//! `airfocus` command-line entry point.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for domain or input errors.

mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use args::{Cli, Command};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) | CliError::Io(_) => 2,
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let report = match &cli.command {
        Command::Linkbudget(a) => commands::linkbudget(a),
        Command::Lens(c) => commands::lens(c),
        Command::Fresnel(c) => commands::fresnel(c),
        Command::Polar(c) => commands::polar(c, cli.seed),
        Command::Spectrum(c) => commands::spectrum(c, cli.seed),
        Command::Growth(c) => commands::growth(c),
    }?;
    Ok(report.render(cli.format))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(path) => std::fs::write(path, &text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::Usage(_) = e {
                eprintln!("error: {e}\n\n{}", Cli::command_usage());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

impl Cli {
    fn command_usage() -> String {
        use clap::CommandFactory;
        Cli::command().render_usage().to_string()
    }
}
