//! The `ltl` command line: mesh utilities, operator evaluation, solver runs,
//! convergence reports and recipes.
//!
//! Exit codes: 0 success, 1 `--verify` mismatch, 2 bad input or mesh
//! precondition, 3 operator failure, 4 solver blow-up, 5 configuration error
//! (including a missing exact reference).

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod source;

use args::{Cli, Command, SolveCommand};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn verify(message: impl Into<String>) -> Self {
        Self::new(1, message)
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self::new(2, message)
    }

    pub fn operator(message: impl Into<String>) -> Self {
        Self::new(3, message)
    }

    pub fn blowup(message: impl Into<String>) -> Self {
        Self::new(4, message)
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(5, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Parses `args` (program name first) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let result = config::expand_config(args).and_then(|args| match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            Ok(code)
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            i32::from(e.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Mesh(cmd) => commands::mesh(cmd),
        Command::Ops(args) => commands::ops(args),
        Command::Solve(SolveCommand::Heat(args)) => commands::heat(args),
        Command::Solve(SolveCommand::Turing(args)) => commands::turing(args),
        Command::Convergence(args) => commands::convergence(args),
        Command::Run(args) => commands::recipe(args),
    }
}
