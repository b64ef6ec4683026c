//! The two join protocols.
//!
//! - [`bmm`]: output-sensitive Boolean matrix multiplication. Alice and Bob
//!   search for a witness `k` whose column `A[·,k]` and row `B[k,·]` still
//!   cover a zero of the shared output `C`, then collect all such entries by
//!   find-all graph collision on the complement of `C`.
//! - [`bmm_cost_model`]: the same control flow executed classically and
//!   charged by the per-round cost formula, for scaling runs.
//! - [`mm_f2`]: classical F2 multiplication. Dense product columns are
//!   detected with sampled Freivalds checks and transferred directly; sparse
//!   ones are recovered from a linear sketch of `A` by peeling.

mod bmm;
mod cost_model;
mod freivalds;
mod mm_f2;
mod sketch;

pub use bmm::{bmm, BmmRound, BmmTrace};
pub use cost_model::{bmm_cost_model, CostModelRun};
pub use freivalds::{freivalds_columns, freivalds_repetitions, freivalds_round};
pub use mm_f2::{mm_f2, mm_f2_with, ColumnClassification, MmF2Outcome, MmF2Params};
pub use sketch::{Measurement, SensingSketch, SketchError};

use thiserror::Error;

use crate::f2core::F2Error;
use crate::ledger::LedgerError;
use crate::qsim::QsimError;

/// Largest inner dimension `n` the exact-mode BMM protocol accepts.
pub const BMM_EXACT_CAP: usize = 1 << 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JoinError {
    #[error("promise violated: found {found} ones, bound is {ell}")]
    PromiseViolation { found: usize, ell: usize },
    #[error("exact mode supports n <= {cap}, got {n}")]
    ExactCap { n: usize, cap: usize },
    #[error("instance is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("{columns} columns still undecoded after {repetitions} sketch repetitions")]
    DecodeBudget { columns: usize, repetitions: u32 },
    #[error(transparent)]
    Sketch(#[from] SketchError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    F2(#[from] F2Error),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}
