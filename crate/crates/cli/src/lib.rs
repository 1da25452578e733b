//! Command-line front end: argument handling, file I/O and report emission.
//!
//! Exit codes: 0 on success (including truncated results, which are flagged),
//! 1 on bad input or a violated precondition, 2 when a bound that must hold
//! on valid input is found violated.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::Parser;
use covergrowth::cover::{CoverError, DEFAULT_BUDGET};
use covergrowth::graph::GraphError;
use covergrowth::scalar::parse_rational;
use covergrowth::surface::SurfaceError;
use covergrowth::witness::WitnessError;
use covergrowth::Rational;
use thiserror::Error;

pub mod args;
mod commands;
pub mod report;

use args::{Cli, Command, Format, GraphCommand, RefCommand, SurfaceCommand};
use report::{render, Report, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Precondition(String),
    #[error("bound violated: {0}")]
    Violation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violation(_) => 2,
            _ => 1,
        }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<WitnessError> for CliError {
    fn from(e: WitnessError) -> Self {
        match e {
            WitnessError::Internal(_) => CliError::Violation(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::Internal(_) => CliError::Violation(e.to_string()),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

/// Result of one invocation; `main` forwards it to the process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 1, stdout: String::new(), stderr: text },
            };
        }
    };
    match dispatch(&cli) {
        Ok((config, report)) => {
            let formats: &[Format] = if matches!(cli.command, Command::Gen(_)) && cli.common.out.is_none() {
                &[]
            } else {
                &cli.common.format
            };
            match render(&config, &report, formats, cli.common.out.as_deref()) {
                Ok(r) => match report.violation {
                    Some(v) => Outcome { code: 2, stdout: r.stdout, stderr: format!("error: bound violated: {v}\n") },
                    None => Outcome { code: 0, stdout: r.stdout, stderr: String::new() },
                },
                Err(e) => failure(e),
            }
        }
        Err(e) => failure(e),
    }
}

fn failure(e: CliError) -> Outcome {
    Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") }
}

fn dispatch(cli: &Cli) -> Result<(RunConfig, Report), CliError> {
    let common = &cli.common;
    let budget = common.budget.unwrap_or(DEFAULT_BUDGET);
    if budget == 0 {
        return Err(CliError::Precondition("budget must be positive".into()));
    }
    let mut config = RunConfig {
        command: String::new(),
        inputs: Vec::new(),
        seed: common.seed,
        budget,
        lambda: None,
        rmax: None,
        grid: None,
        r0: None,
        eps: None,
    };
    let report = match &cli.command {
        Command::Graph(GraphCommand::Validate(a)) => commands::graph_validate(&mut config, a)?,
        Command::Graph(GraphCommand::Growth(a)) | Command::Growth(a) => commands::growth(&mut config, a)?,
        Command::Graph(GraphCommand::Entropy(a)) => commands::entropy(&mut config, a)?,
        Command::Graph(GraphCommand::Reduce(a)) => commands::reduce(&mut config, a)?,
        Command::Graph(GraphCommand::Witness(a)) | Command::Witness(a) => commands::witness(&mut config, a, false)?,
        Command::Graph(GraphCommand::Verify(a)) => commands::witness(&mut config, a, true)?,
        Command::Surface(SurfaceCommand::Validate(a)) => commands::surface_validate(&mut config, a)?,
        Command::Surface(SurfaceCommand::Systole(a)) => commands::systole(&mut config, a)?,
        Command::Surface(SurfaceCommand::Capture(a)) => commands::capture(&mut config, a)?,
        Command::Surface(SurfaceCommand::Nerve(a)) => commands::nerve(&mut config, a)?,
        Command::Surface(SurfaceCommand::Pipeline(a)) => commands::pipeline(&mut config, a)?,
        Command::Ref(RefCommand::Curves(a)) => commands::curves(&mut config, a)?,
        Command::Gen(a) => commands::gen(&mut config, a)?,
    };
    Ok((config, report))
}

pub(crate) fn read_input(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Precondition(format!("{}: {e}", path.display())))
}

pub(crate) fn rational_arg(name: &str, text: &str) -> Result<Rational, CliError> {
    parse_rational(text).ok_or_else(|| CliError::Precondition(format!("--{name}: `{text}` is not a rational number")))
}
