//! Command-line front end for `linfit`.

pub mod args;
mod bench;
mod commands;

use std::fmt;
use std::io::Write;

pub use args::Cli;

/// Exit status contract: 0 success, 1 bad input, 2 internal or numerical failure.
#[derive(Debug)]
pub enum CliError {
    User(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<linfit::Error> for CliError {
    fn from(e: linfit::Error) -> Self {
        if e.is_user_error() {
            CliError::User(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::User(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn run(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    use args::{Command, GenCommand};
    match cli.command {
        Command::Fit(a) => commands::fit(&a, stdout),
        Command::Remove(a) => commands::remove(&a, stdout),
        Command::Bench(a) => bench::run(&a, stdout),
        Command::Gen(GenCommand::Line(a)) => commands::gen_line(&a, stdout),
        Command::Gen(GenCommand::Ellipse(a)) => commands::gen_ellipse(&a, stdout),
        Command::Gen(GenCommand::Gallery(a)) => commands::gen_gallery(&a, stdout),
        Command::Classify(a) => commands::classify(&a, stdout),
    }
}
