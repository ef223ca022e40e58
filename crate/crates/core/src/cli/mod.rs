//! Command-line front end: configuration, commands and report writing.

pub mod commands;
pub mod config;
pub mod output;
pub mod quantity;

use std::path::Path;

use thiserror::Error;

pub use commands::{cmd_compare, cmd_design, cmd_simulate, cmd_solve, cmd_sweep, CommandError};
pub use config::{parse_config, RawConfig, RunConfig};
pub use output::{format_number, write_outcome, Format, Outcome, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error("`{key}`: unit mismatch, found `{found}`, expected {expected}")]
    UnitMismatch {
        key: String,
        found: String,
        expected: String,
    },

    #[error("`{key}` = {value} is out of range: {constraint}")]
    Range {
        key: String,
        value: f64,
        constraint: String,
    },

    #[error("missing section or key `{key}`")]
    Missing { key: String },

    #[error("`{key}`: {message}")]
    Invalid { key: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Design,
    Solve,
    Sweep,
    Simulate,
    Compare,
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, CommandError> {
    match command {
        Command::Design => cmd_design(cfg),
        Command::Solve => cmd_solve(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::Compare => cmd_compare(cfg),
    }
}

/// Parses the configuration, runs the command and writes its artifacts.
/// Diagnostics go to standard error; the return value is the exit code.
pub fn run(command: Command, config: &Path, out: &Path, format: Format) -> i32 {
    let cfg = match parse_config(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let outcome = match execute(command, &cfg) {
        Ok(o) => o,
        Err(CommandError::Config(e)) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    for d in &outcome.diagnostics {
        eprintln!("note: {d}");
    }
    if let Err(e) = write_outcome(&outcome, &cfg.to_raw(), out, format) {
        eprintln!("error: cannot write artifacts to {}: {e}", out.display());
        return EXIT_CONFIG;
    }
    match outcome.status {
        Status::Ok => EXIT_OK,
        Status::Infeasible => EXIT_INFEASIBLE,
    }
}
