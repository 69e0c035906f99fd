//! `lzlab`: classify coefficient quadruples, certify shifts on Z(m), build the
//! counterexamples and emit plot data.
//!
//! Exit codes: 0 success, 2 input error, 3 domain error, 4 property failure.

mod certify;
mod classify;
mod counterexample;
mod error;
mod output;
mod plotdata;

use clap::{Args, Parser, Subcommand, ValueEnum};
use error::CliError;
use lzlab_core::real::RealGrid;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "lzlab",
    version,
    about = "Identifiability up to shift for two linear forms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a coefficient quadruple over R, Q, Qp:<p> or Zp:<p>.
    Classify(ClassifyArgs),
    /// Seeded shift-recovery round trips on Z(p).
    Certify(CertifyArgs),
    /// Build a counterexample pair and verify it.
    Counterexample(CounterexampleArgs),
    /// Emit tidy CSV for external plotting.
    ///
    /// Sources and their columns:
    ///   re1-modulus            y, mod_mu, mod_nu, exp_cos_minus_1
    ///   cascade-residual       h, residual   (Gaussian log-ratio)
    ///   classification-sweep   id, quad, field, iid, verdict
    ///   <dir>                  a `certify --out <dir>` run:
    ///                          trial, factor, planted, recovered, status
    #[command(verbatim_doc_comment)]
    EmitPlotdata(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Human,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// R, Q, Qp:<p> or Zp:<p>.
    #[arg(long)]
    field: String,
    /// a2,a3,b2,b3: decimals or fractions for R and Q, `p^v*(digits)` or
    /// rationals for Qp, integers for Zp.
    #[arg(long, allow_hyphen_values = true)]
    quad: String,
    /// ξ2 and ξ3 are identically distributed.
    #[arg(long)]
    iid: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Also write the JSON verdict to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Odd prime modulus m.
    #[arg(long)]
    p: u64,
    /// a2,a3,b2,b3 as integers modulo p.
    #[arg(long, allow_hyphen_values = true)]
    quad: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    trials: u32,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Directory for report.json and rows.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CounterexampleArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Odd prime (pr1, pr2).
    #[arg(long)]
    p: Option<u64>,
    /// Level n of Z(pⁿ) (pr1).
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// ε in (0, 1/(p−1)), decimal or fraction; defaults to 1/(2(p−1)).
    #[arg(long)]
    eps: Option<String>,
    /// Coefficient a2 (pr1).
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    a2: i64,
    /// Coefficient a3 (pr1).
    #[arg(long, allow_hyphen_values = true, default_value_t = 2)]
    a3: i64,
    /// Quadruple for the joint-law check (pr2), integers modulo p.
    #[arg(long, allow_hyphen_values = true, default_value = "1,2,1,2")]
    quad: String,
    /// Grid min:max:step (re1).
    #[arg(long, allow_hyphen_values = true, default_value_t = RealGrid::default())]
    grid: RealGrid,
    /// Seed for the outer factors ξ1, ξ4 (pr2).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// Directory for distributions, CF tables and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    /// Mirrored Poisson pair on the real line.
    Re1,
    /// ± pair on the subgroup pⁿ⁻¹·Z(pⁿ).
    Pr1,
    /// ± pair on Z(p).
    Pr2,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// re1-modulus, cascade-residual, classification-sweep or a run directory.
    source: String,
    /// Grid min:max:step for the real-line sources.
    #[arg(long, allow_hyphen_values = true, default_value_t = RealGrid::default())]
    grid: RealGrid,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// `LZLAB_TOLERANCE` or the library default.
fn tolerance() -> Result<f64, CliError> {
    match std::env::var("LZLAB_TOLERANCE") {
        Err(_) => Ok(lzlab_core::DEFAULT_TOLERANCE),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(CliError::input(format!(
                "LZLAB_TOLERANCE={s:?} is not a positive number"
            ))),
        },
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let tol = tolerance()?;
    match cli.command {
        Command::Classify(a) => classify::run(&a),
        Command::Certify(a) => certify::run(&a, tol),
        Command::Counterexample(a) => counterexample::run(&a, tol),
        Command::EmitPlotdata(a) => plotdata::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lzlab: {e}");
            ExitCode::from(e.code())
        }
    }
}
