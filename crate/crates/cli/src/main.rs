//! `twobody`: batch front end for the two-body bound-state solver.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Common, OracleArgs};
use config::Format;

/// Invalid input: exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let msg = self.0.strip_prefix("configuration error: ").unwrap_or(&self.0);
        write!(f, "configuration error: {msg}")
    }
}

impl std::error::Error for ConfigError {}

/// A solve that ran but failed: exit code 3.
#[derive(Debug)]
pub struct SolverFailure(pub String);

impl std::fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "solver failure: {}", self.0)
    }
}

impl std::error::Error for SolverFailure {}

#[derive(Debug, Parser)]
#[command(name = "twobody", version, about = "Covariant two-body relativistic bound states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Energy units: natural, MeV, MHz or meV.
    #[arg(long, global = true)]
    units: Option<String>,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for independent solves (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Treat solver warnings as failures.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve every channel of a config.
    Solve { config: PathBuf },
    /// Recompute a reference table (table1 … table5).
    Table {
        name: String,
        /// Restrict to these rows, comma-separated (commas inside parentheses belong
        /// to the label); `label:column` selects single cells of tables 3–5.
        #[arg(long, num_args = 1..)]
        rows: Option<Vec<String>>,
        /// TOML file with solver settings.
        #[arg(long)]
        settings: Option<PathBuf>,
    },
    /// Sample the matching determinant of one channel over a binding-energy grid.
    Scan {
        config: PathBuf,
        /// Channel index in the config.
        #[arg(long)]
        channel: usize,
        /// lo:hi:n in natural units of binding energy.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Classical orbit from the config's [orbit] section.
    Orbit { config: PathBuf },
    /// Closed-form reference values.
    Oracle {
        /// schroedinger, klein-gordon, dirac, free or heun.
        kind: String,
        /// Mass of the level formula (m_R or the light mass).
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long, default_value_t = twobody_core::constants::ALPHA)]
        alpha: f64,
        /// ℓ (Schrödinger, Klein-Gordon), 2j (Dirac) or j (Heun).
        #[arg(long, default_value_t = 0)]
        angular: u32,
        #[arg(long, default_value_t = 3)]
        count: u32,
        /// Relative momentum (free).
        #[arg(long)]
        q: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        m1: f64,
        #[arg(long, default_value_t = 1.0)]
        m2: f64,
        /// Invariant mass (Heun).
        #[arg(long)]
        lambda: Option<f64>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let common = Common { format: cli.format, units: cli.units, out: cli.out, threads: cli.threads, strict: cli.strict };
    match cli.command {
        Command::Solve { config } => commands::solve(&config, &common),
        Command::Table { name, rows, settings } => {
            let rows = rows.map(|r| r.iter().flat_map(|s| split_rows(s)).collect());
            commands::table(&name, rows, settings.as_deref(), &common)
        }
        Command::Scan { config, channel, grid } => commands::scan(&config, channel, &grid, &common),
        Command::Orbit { config } => commands::orbit(&config, &common),
        Command::Oracle { kind, mass, alpha, angular, count, q, m1, m2, lambda } => {
            commands::oracle(&OracleArgs { kind, mass, alpha, angular, count, q, m1, m2, lambda }, &common)
        }
    }
}

/// Splits on commas outside parentheses, so "(p,e),(p,mu)" gives two labels.
fn split_rows(s: &str) -> Vec<String> {
    let mut out = vec![];
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    out.push(cur);
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ConfigError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<twobody_core::Error>() {
        Some(e) if e.is_input_error() => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("twobody: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
