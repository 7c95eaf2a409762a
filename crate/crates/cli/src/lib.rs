//! Command-line front end for the `nes-core` numerics.
//!
//! Every command produces a [`output::Table`] that is written as CSV or JSON
//! to `--out` or standard output. Errors map to exit codes through
//! [`CliError::exit_code`].

pub mod commands;
pub mod output;
pub mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use nes_core::loop_regularization::DEFAULT_QUADRATURE_TOLERANCE;
use nes_core::{EvalMode, NesError};

use output::{Format, Table};

#[derive(Debug, Parser)]
#[command(name = "nes", version, about = "NES kinematics, loop regularization and blurred-LT numerics")]
pub struct Cli {
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ρ and λ versus the velocity ratio on both branches.
    Figure2(Figure2Args),
    /// Effective dimension q against E/E_p per rest energy.
    Figure3(Figure3Args),
    /// The loop integral D(0).
    Dzero(DzeroArgs),
    /// Θ, μ* and τ_L for one rest energy.
    MassCorrection(MassCorrectionArgs),
    /// Θ and Θ⁻¹ for several rest energies.
    ThetaTable(ThetaTableArgs),
    /// Monte Carlo recovery of a boost from fluctuation moments.
    BlurEstimate(BlurArgs),
    /// Run the invariant suite and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Figure2Args {
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value_t = 10.0)]
    pub sigma_max: f64,
}

#[derive(Debug, Args)]
pub struct Figure3Args {
    /// Rest energy in GeV; repeat for several curves.
    #[arg(long = "mass-gev", default_values_t = [128.0, 190.0, 1.2e19])]
    pub masses_gev: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-18)]
    pub ratio_min: f64,
    #[arg(long, default_value_t = 1e2)]
    pub ratio_max: f64,
}

#[derive(Debug, Args)]
pub struct DzeroArgs {
    /// Rest energy in GeV; sets k* = E_p/m0c².
    #[arg(long, conflicts_with = "kstar", required_unless_present = "kstar")]
    pub mass_gev: Option<f64>,
    /// Upper split point k* directly.
    #[arg(long)]
    pub kstar: Option<f64>,
    #[arg(long, value_parser = parse_mode, default_value = "paper")]
    pub mode: EvalMode,
    /// Relative tolerance of the principal-value quadrature.
    #[arg(long, default_value_t = DEFAULT_QUADRATURE_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct MassCorrectionArgs {
    #[arg(long)]
    pub mass_gev: f64,
    /// Coupling w in Js⁻¹.
    #[arg(long)]
    pub coupling: f64,
    #[arg(long, value_parser = parse_mode, default_value = "paper")]
    pub mode: EvalMode,
}

#[derive(Debug, Args)]
pub struct ThetaTableArgs {
    #[arg(long = "mass-gev", default_values_t = [128.0, 5.1e-4, 0.94])]
    pub masses_gev: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct BlurArgs {
    #[arg(long, default_value_t = 4)]
    pub dim: usize,
    /// Observer frame ρ.
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    /// Particle frame ρ′; the boost is the subluminal solution between frames.
    #[arg(long, conflicts_with = "sigma")]
    pub rho_prime: Option<f64>,
    /// Relative velocity ratio; used when `--rho-prime` is absent.
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s2: f64,
    #[arg(long, default_value_t = 0.01)]
    pub e2: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Independent random streams sampled in parallel.
    #[arg(long, default_value_t = 8)]
    pub streams: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Only run groups whose name contains this string.
    #[arg(long)]
    pub filter: Option<String>,
    /// Log each property to standard error as it runs.
    #[arg(long, short)]
    pub verbose: bool,
    /// Extra metric parameter run through the kinematics checks.
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

fn parse_mode(s: &str) -> Result<EvalMode, String> {
    s.parse::<EvalMode>().map_err(|e| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Numeric(#[from] NesError),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error("{failed} of {total} properties failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Numeric(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Usage(_) => "usage",
            CliError::VerifyFailed { .. } => "verify_failed",
        }
    }

    /// 2 for invalid input, 3 for numerical failures, 1 for a failed
    /// verification run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(e) if e.is_validation() => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) | CliError::Usage(_) => 2,
            CliError::VerifyFailed { .. } => 1,
        }
    }

    /// `{"error": {"kind": ..., "message": ...}}`.
    pub fn to_json(&self) -> String {
        let body = serde_json::json!({
            "error": { "kind": self.kind(), "message": self.to_string() }
        });
        body.to_string()
    }
}

/// Executes one parsed invocation, writing its table to `--out` or stdout.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (table, verdict) = match &cli.command {
        Command::Figure2(a) => (commands::figure2(a)?, Ok(())),
        Command::Figure3(a) => (commands::figure3(a)?, Ok(())),
        Command::Dzero(a) => (commands::dzero(a)?, Ok(())),
        Command::MassCorrection(a) => (commands::mass_correction(a)?, Ok(())),
        Command::ThetaTable(a) => (commands::theta_table(a)?, Ok(())),
        Command::BlurEstimate(a) => (commands::blur_estimate(a)?, Ok(())),
        Command::Verify(a) => {
            let report = verify::run(a)?;
            let verdict = match report.failures() {
                0 => Ok(()),
                failed => Err(CliError::VerifyFailed { failed, total: report.len() }),
            };
            (report.to_table(), verdict)
        }
    };
    emit(&table, cli)?;
    verdict
}

fn emit(table: &Table, cli: &Cli) -> Result<(), CliError> {
    let bytes = table.render(cli.format).map_err(|e| CliError::Io(e.to_string()))?;
    match &cli.out {
        Some(path) => fs::write(path, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
