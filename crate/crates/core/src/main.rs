use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hvdc_taplab::cli::{self, Command, Format};

/// Steady-state design and simulation of HVDC corridors with hybrid
/// LCC + full-bridge MMC series taps.
#[derive(Debug, Parser)]
#[command(name = "hvdc-taplab", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Both,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML configuration file (JSON when the extension is .json).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for the CSV and JSON artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Both)]
    format: FormatArg,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Size the hybrid tap: transformer ratios, capacities, capacitor sum, losses.
    Design(Common),
    /// Solve single operating points and corridor limits.
    Solve(Common),
    /// Sweep power distribution or corridor limits over a grid.
    Sweep(Common),
    /// Run a quasi-static setpoint schedule.
    Simulate(Common),
    /// Compare the hybrid tap against an FBMMC-only tap.
    Compare(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                cli::EXIT_CONFIG as u8
            } else {
                0
            });
        }
    };
    let (command, args) = match cli.command {
        Cmd::Design(a) => (Command::Design, a),
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Compare(a) => (Command::Compare, a),
    };
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
        FormatArg::Both => Format::Both,
    };
    ExitCode::from(cli::run(command, &args.config, &args.out, format) as u8)
}
