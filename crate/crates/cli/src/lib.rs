//! `simulmob` command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or configuration error.

use std::ffi::OsString;
use std::io::{self, Write};

use clap::Parser;
use thiserror::Error;

pub mod args;
mod commands;
pub mod plot;
pub mod render;

pub use args::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

impl From<simulmob_core::scenarios::ConfigError> for CliError {
    fn from(e: simulmob_core::scenarios::ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{e}");
            return e.exit_code();
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(()) => match out.flush() {
            Ok(()) => 0,
            Err(_) => 1,
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
