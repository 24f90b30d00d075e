//! `hyperfock` command-line front end.

mod commands;
mod record;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hyperfock::analysis::TableKind;
use hyperfock::circuits::Basis;
use hyperfock::fock::Statistics;

/// Failure classes with stable exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable circuit text, parse or semantic errors.
    Input(String),
    /// A computed quantity broke an invariant beyond the tolerance.
    Numeric(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
}

impl From<hyperfock::Error> for CliError {
    fn from(e: hyperfock::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "hyperfock", version, about = "Few-particle linear-optics simulator")]
pub struct Cli {
    /// Emit schema-versioned JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for Monte Carlo estimates.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for numeric invariant checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct PhaseArgs {
    #[arg(long = "phase-l", default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phase_l: f64,
    #[arg(long = "phase-d", default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phase_d: f64,
    #[arg(long = "phase-r", default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phase_r: f64,
    #[arg(long = "phase-u", default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phase_u: f64,
}

#[derive(Args, Debug, Clone)]
pub struct CircuitArgs {
    /// `li`, `swap`, a bundled source name (e.g. `li_boson`) or a `.cdl` path.
    pub circuit: String,
    /// Particle statistics (built-in circuits only; sources declare their own).
    #[arg(long, value_parser = parse_stats)]
    pub stats: Option<Statistics>,
    /// Measurement combination for built-in circuits.
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<TableKind>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Coincidence table at one phase setting.
    Table {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[command(flatten)]
        phases: PhaseArgs,
    },
    /// CHSH combination for two analyzer angles per party.
    Chsh {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        a0: f64,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        a1: f64,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        b0: f64,
        #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
        b1: f64,
    },
    /// Tables over a Cartesian phase grid, written as CSV.
    Sweep {
        #[command(flatten)]
        circuit: CircuitArgs,
        /// `N` equally spaced angles over [0, 2π) per phase.
        #[arg(long, conflicts_with = "values")]
        grid: Option<usize>,
        /// Explicit comma-separated angles per phase.
        #[arg(long, value_delimiter = ',', value_parser = parse_angle, allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
        /// CSV output path; `-` for standard output.
        #[arg(long, short)]
        output: String,
    },
    /// Basis-discrimination success with cloned degrees of freedom.
    Signal {
        /// One particle carrying N cloned DOFs.
        #[arg(long, conflicts_with = "copies", required_unless_present = "copies")]
        dofs: Option<u32>,
        /// M particles, two cloned DOFs each.
        #[arg(long)]
        copies: Option<u32>,
        /// Also run a Monte Carlo estimate with this many trials.
        #[arg(long)]
        mc: Option<u64>,
    },
    /// Detector distribution of the sorter cascade fed by clones.
    Cascade {
        /// Number of cloned DOFs.
        #[arg(long, short, default_value_t = 2)]
        n: u32,
        /// Alice's basis, `z` or `x`.
        #[arg(long, default_value = "x", value_parser = parse_basis)]
        basis: Basis,
    },
    /// Parse and compile a circuit source.
    Check { file: String },
}

fn parse_angle(s: &str) -> Result<f64, String> {
    use hyperfock::cdl::{tokenize, TokenKind};
    let toks = tokenize(s).map_err(|e| format!("bad angle `{s}`: {}", e.message))?;
    match toks.as_slice() {
        [t, end] if t.kind == TokenKind::Number && end.kind == TokenKind::End => Ok(t.value.expect("folded")),
        _ => Err(format!("bad angle `{s}`: expected a decimal or pi-expression such as -3*pi/4")),
    }
}

fn parse_stats(s: &str) -> Result<Statistics, String> {
    s.parse::<Statistics>().map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> Result<TableKind, String> {
    s.parse::<TableKind>().map_err(|e| e.to_string())
}

fn parse_basis(s: &str) -> Result<Basis, String> {
    s.parse::<Basis>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
