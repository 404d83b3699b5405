//! Command-level drivers behind the `pdsplit` binary: each command reads its
//! settings, runs one experiment, writes CSV/PGM artifacts and prints a summary.

mod commands;
mod config;

use std::io::Write;
use std::path::Path;

pub use commands::{cmd_denoise, cmd_svm, cmd_toy, cmd_validate};
pub use config::{
    Command, CommonOptions, DenoiseExperiment, Settings, SvmExperiment, ToyExperiment,
    ValidateExperiment,
};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parameter(_) | Error::Dimension { .. } | Error::Config(_) => EXIT_CONFIG,
        Error::Io { .. } | Error::Format { .. } => EXIT_IO,
        Error::Infeasible(_) | Error::NotStronglyConvex { .. } => EXIT_INFEASIBLE,
    }
}

/// Loads settings, runs `command` and returns the process exit code. The
/// summary goes to `out`, errors to `err`.
pub fn execute(
    command: Command,
    config: Option<&Path>,
    overrides: &[(String, String)],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let result = Settings::load(command, config, overrides).and_then(|s| match command {
        Command::Denoise => DenoiseExperiment::from_settings(&s).and_then(|e| cmd_denoise(&e, out)),
        Command::Svm => SvmExperiment::from_settings(&s).and_then(|e| cmd_svm(&e, out)),
        Command::Toy => ToyExperiment::from_settings(&s).and_then(|e| cmd_toy(&e, out)),
        Command::Validate => {
            ValidateExperiment::from_settings(&s).and_then(|e| cmd_validate(&e, out))
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
