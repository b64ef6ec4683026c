//! `qjoin`: batch experiment runner for the join protocols.
//!
//! Exit codes: 0 when every requested threshold is met, 1 when a threshold
//! is missed or a run fails, 2 on usage errors.

mod commands;
mod grid;
mod summary;
mod trials;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use grid::Grid;

#[derive(Debug, Parser)]
#[command(name = "qjoin", version, about = "Run join-protocol experiments and write CSV/JSON results")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Output-sensitive Boolean matrix multiplication on promise instances.
    RunBmm(RunArgs),
    /// F2 matrix multiplication (classical; `--mode` must be exact).
    RunMmf2(RunArgs),
    /// Set disjointness; `--ell` is the intersection size, sets have ⌊√n⌋ elements.
    RunDisj(RunArgs),
    /// Graph collision; `--ell` collisions planted between sets of ⌊√n⌋ vertices.
    RunGc(RunArgs),
    /// Cost-model grids with log-log slope fits and bootstrap intervals.
    Scaling(ScalingArgs),
    /// Random validations of the four lower-bound embeddings.
    ValidateReductions(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    CostModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalingProtocol {
    /// bmm_cost_model on extremal cross instances, grid over n and ℓ.
    BmmCost,
    /// disj with |a| = |b| = √n and one common element; cost divided by log₂ n.
    Disj,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Trials per grid cell.
    #[arg(long, default_value_t = 10)]
    pub trials: u64,
    /// Base seed; trial seeds are derived per (cell, trial).
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Results CSV, one row per (cell, trial).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the summary JSON here (it always goes to stdout).
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    /// Message-level ledger CSV.
    #[arg(long)]
    pub ledger_out: Option<PathBuf>,
    /// Record wall time; without it the column is 0 and the CSV is reproducible.
    #[arg(long)]
    pub timing: bool,
    /// Fail (exit 1) when any cell's success rate is below this.
    #[arg(long)]
    pub min_success: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, default_value_t = 1.0)]
    pub c_shuttle: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_round: f64,
    /// Injected false-negative rate in cost-model mode.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Inner dimension grid: a value, a list `a,b,c`, or an octave range `lo..hi`.
    #[arg(long)]
    pub n: Grid,
    /// Outer dimension (run-bmm only); defaults to n.
    #[arg(long)]
    pub m: Option<usize>,
    /// Promise bound grid (intersection size for run-disj, collisions for run-gc).
    #[arg(long, default_value = "1")]
    pub ell: Grid,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long, value_enum)]
    pub protocol: ScalingProtocol,
    #[arg(long)]
    pub n: Grid,
    /// ℓ grid (bmm-cost only).
    #[arg(long, default_value = "256")]
    pub ell: Grid,
    /// Outer dimension of the bmm-cost instances.
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    /// Bootstrap resamples per fit.
    #[arg(long, default_value_t = 1000)]
    pub resamples: usize,
    /// Fail unless every slope along ℓ is within --slope-tol of this.
    #[arg(long)]
    pub expect_ell_slope: Option<f64>,
    /// Fail unless every slope along n is within --slope-tol of this.
    #[arg(long)]
    pub expect_n_slope: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub slope_tol: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Per-validation CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::RunBmm(a) => commands::run(trials::Protocol::Bmm, "run-bmm", a),
        Command::RunMmf2(a) => commands::run(trials::Protocol::MmF2, "run-mmf2", a),
        Command::RunDisj(a) => commands::run(trials::Protocol::Disj, "run-disj", a),
        Command::RunGc(a) => commands::run(trials::Protocol::Gc, "run-gc", a),
        Command::Scaling(a) => commands::scaling(a),
        Command::ValidateReductions(a) => commands::validate_reductions(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some thresholds were not met");
            ExitCode::from(1)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
