//! Command-line surface for `belltransfer-core`: config resolution, JSON and CSV
//! reports, operator dumps and threaded sweeps.

// Tolerance checks are written `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod format;
pub mod parallel;
pub mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use config::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Domain(#[from] belltransfer_core::Error),
    #[error("invariant violated: {0}")]
    Violation(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let _ = write!(stderr, "{}", e.render());
            return 1;
        }
    };
    let result = match &cli.command {
        Command::Transfer(a) => a.resolve().and_then(|c| commands::transfer(&c, stdout)),
        Command::Trace(a) => a.resolve().and_then(|c| commands::trace(&c, stdout)),
        Command::Sweep(a) => a.resolve().and_then(|c| commands::sweep(&c, stdout)),
        Command::Verify(a) => a.resolve().and_then(|c| commands::verify(&c, stdout)),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
