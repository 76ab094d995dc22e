mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(slehydro::Error),
    Io(String),
}

impl From<slehydro::Error> for CliError {
    fn from(e: slehydro::Error) -> Self {
        match e {
            slehydro::Error::BadConfig(msg) => CliError::Usage(msg),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("error: {m}"),
            CliError::Io(m) => format!("error: cannot write output: {m}"),
            CliError::Numerical(e) => {
                let residual = e.residual().map_or(String::new(), |r| format!(", residual {r:e}"));
                format!("numerical failure in {}{residual}: {e}", e.operation())
            }
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SLEHYDRO_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SLEHYDRO_THREADS = \"{v}\" must be a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let config = serde_json::to_value(&cli.command).map_err(|e| CliError::Usage(e.to_string()))?;
    match &cli.command {
        Command::Hull(a) => commands::hull(a, &config),
        Command::Gmap(a) => commands::gmap(a, &config),
        Command::Density(a) => commands::density(a, &config),
        Command::Simulate(a) => commands::simulate(a, &config),
        Command::Converge(a) => commands::converge(a, &config),
        Command::Asymptote(a) => commands::asymptote(a, &config),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors and 0 for --help/--version.
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
