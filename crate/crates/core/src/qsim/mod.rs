//! Distributed Grover search and the communication subroutines built on it.
//!
//! Two execution modes share every code path above the search engine:
//!
//! - [`Mode::Exact`] simulates the shuttled register as a statevector and
//!   charges the iterations actually executed.
//! - [`Mode::CostModel`] computes answers classically, charges the theoretical
//!   iteration counts scaled by the model constants, and injects a false
//!   negative with probability `ε` to emulate bounded error.
//!
//! Charging conventions (all amounts in the [`CommLedger`](crate::ledger::CommLedger)):
//!
//! | message | cost |
//! |---|---|
//! | one shuttle of a search register over `[n]` | `⌈log₂ n⌉` qubits (at least 1) |
//! | one application of the remote reflection | a round trip, `2⌈log₂ n⌉` qubits |
//! | announcing an integer in `[0, n]` | `⌈log₂(n+1)⌉` bits |
//! | announcing an outcome index plus a bit | `⌈log₂ n⌉ + 1` bits |

mod collision;
mod disj;
mod instance_search;
mod plan;
mod search;
mod state;

pub use collision::{
    collisions_oracle, graph_collision, graph_collision_all, AdjacencyMatrix, BipartiteGraph,
    ComplementGraph,
    GcOutcome,
};
pub use disj::{disj, disj_all, disj_with_policy, DisjOutcome};
pub use instance_search::{instance_search, InstanceFamily};
pub use plan::{optimal_iterations, GroverPlan, PlanPolicy, Stage};
pub use search::{grover_search, SearchOutcome};
pub use state::SearchState;

use thiserror::Error;

use crate::f2core::{ceil_log2, F2Error};
use crate::ledger::{CommLedger, Direction, LedgerError};

/// Largest domain the exact statevector mode accepts.
pub const EXACT_DOMAIN_CAP: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("search support is empty")]
    EmptySupport,
    #[error("instance list is empty")]
    EmptyInstanceList,
    #[error("domain size {n} exceeds the exact simulation cap {cap}")]
    SimulationCap { n: usize, cap: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("support index {index} outside domain of size {n}")]
    SupportOutOfRange { index: usize, n: usize },
    #[error("invalid cost model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    F2(#[from] F2Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Exact,
    CostModel,
}

/// Execution mode plus the constants used by cost-model mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub mode: Mode,
    /// Multiplier on the qubits of each register shuttle.
    pub c_shuttle: f64,
    /// Multiplier on theoretical iteration counts.
    pub c_round: f64,
    /// Injected false-negative probability per subroutine call.
    pub epsilon: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        Self::exact()
    }
}

impl CostModel {
    pub fn exact() -> Self {
        Self {
            mode: Mode::Exact,
            c_shuttle: 1.0,
            c_round: 1.0,
            epsilon: 0.0,
        }
    }

    pub fn cost_model(c_shuttle: f64, c_round: f64, epsilon: f64) -> Result<Self, QsimError> {
        let model = Self {
            mode: Mode::CostModel,
            c_shuttle,
            c_round,
            epsilon,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), QsimError> {
        if !(0.0..0.1).contains(&self.epsilon) {
            return Err(QsimError::InvalidModel(format!(
                "epsilon must lie in [0, 0.1), got {}",
                self.epsilon
            )));
        }
        if !(self.c_shuttle >= 1.0 && self.c_round >= 1.0) {
            return Err(QsimError::InvalidModel(format!(
                "constants must be >= 1, got c_shuttle={} c_round={}",
                self.c_shuttle, self.c_round
            )));
        }
        Ok(())
    }

    pub fn is_exact(&self) -> bool {
        self.mode == Mode::Exact
    }

    /// Qubits per register shuttle over a domain of size `n`.
    pub(crate) fn shuttle_qubits(&self, n: usize) -> u64 {
        let base = index_qubits(n);
        match self.mode {
            Mode::Exact => base,
            Mode::CostModel => (self.c_shuttle * base as f64).ceil() as u64,
        }
    }

    /// Charged iteration count for a theoretical count `x`.
    pub(crate) fn scaled_iterations(&self, x: f64) -> u64 {
        (self.c_round * x).ceil().max(1.0) as u64
    }
}

/// Register width for indices in `[n]`.
pub fn index_qubits(n: usize) -> u64 {
    u64::from(ceil_log2(n as u64)).max(1)
}

/// Bits to announce an integer in `[0, n]`.
pub fn announce_bits(n: usize) -> u64 {
    u64::from(ceil_log2(n as u64 + 1)).max(1)
}

/// Bits to announce an index in `[n]` plus one bit.
pub fn outcome_bits(n: usize) -> u64 {
    u64::from(ceil_log2(n as u64)) + 1
}

/// Charges `amount` if it is nonzero.
pub(crate) fn charge_bits_nonzero(
    ledger: &mut CommLedger,
    direction: Direction,
    amount: u64,
    phase: &str,
) -> Result<(), LedgerError> {
    if amount > 0 {
        ledger.charge_bits(direction, amount, phase)?;
    }
    Ok(())
}

/// Charges `amount` qubits split as evenly as possible between the two
/// directions, `direction` taking the odd one.
pub(crate) fn charge_qubits_split(
    ledger: &mut CommLedger,
    direction: Direction,
    amount: u64,
    phase: &str,
) -> Result<(), LedgerError> {
    let forward = amount.div_ceil(2);
    let back = amount / 2;
    if forward > 0 {
        ledger.charge_qubits(direction, forward, phase)?;
    }
    if back > 0 {
        ledger.charge_qubits(direction.reverse(), back, phase)?;
    }
    Ok(())
}

/// Odd repetition count `r` such that a majority vote over `r` runs of a
/// protocol with error `1/3` errs with probability at most `1/(100·outer)`.
pub fn boost_repetitions(outer: u64) -> u32 {
    let target = 1.0 / (100.0 * outer.max(1) as f64);
    let mut r = 1u32;
    loop {
        if majority_error(r, 1.0 / 3.0) <= target {
            return r;
        }
        r += 2;
    }
}

/// `P[Bin(r, p) ≥ (r+1)/2]` for odd `r`.
pub fn majority_error(r: u32, p: f64) -> f64 {
    let need = r.div_ceil(2);
    let mut coeff = 1.0f64;
    let mut total = 0.0;
    for k in 0..=r {
        if k > 0 {
            coeff *= f64::from(r - k + 1) / f64::from(k);
        }
        if k >= need {
            total += coeff * p.powi(k as i32) * (1.0 - p).powi((r - k) as i32);
        }
    }
    total
}

/// Attempts needed so that `calls` independent terminations, each a false
/// negative with probability at most `1/3` per attempt, all hold with
/// probability at least `2/3`: `⌈log₃(3·calls)⌉`.
pub(crate) fn termination_attempts(calls: usize) -> u32 {
    // smallest r with 3^(r-1) >= calls
    let mut r = 1u32;
    let mut reach = 1usize;
    while reach < calls {
        r += 1;
        reach = reach.saturating_mul(3);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        assert_eq!(index_qubits(1), 1);
        assert_eq!(index_qubits(16), 4);
        assert_eq!(index_qubits(17), 5);
        assert_eq!(announce_bits(16), 5);
        assert_eq!(announce_bits(15), 4);
        assert_eq!(outcome_bits(16), 5);
        assert_eq!(outcome_bits(1), 1);
    }

    #[test]
    fn model_validation() {
        assert!(CostModel::cost_model(1.0, 1.0, 0.0).is_ok());
        assert!(CostModel::cost_model(1.0, 1.0, 0.1).is_err());
        assert!(CostModel::cost_model(0.5, 1.0, 0.0).is_err());
        assert!(CostModel::cost_model(1.0, 0.9, 0.0).is_err());
        assert!(CostModel::cost_model(1.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn majority_error_small_cases() {
        assert!((majority_error(1, 1.0 / 3.0) - 1.0 / 3.0).abs() < 1e-12);
        // r = 3: P[≥2 of 3] = 3p²(1-p) + p³ = 7/27
        assert!((majority_error(3, 1.0 / 3.0) - 7.0 / 27.0).abs() < 1e-12);
    }

    #[test]
    fn boost_is_odd_and_meets_target() {
        for outer in [1, 2, 10, 100, 1000] {
            let r = boost_repetitions(outer);
            assert_eq!(r % 2, 1);
            assert!(majority_error(r, 1.0 / 3.0) <= 1.0 / (100.0 * outer as f64));
            if r > 1 {
                assert!(majority_error(r - 2, 1.0 / 3.0) > 1.0 / (100.0 * outer as f64));
            }
        }
    }

    #[test]
    fn termination_attempts_union_bound() {
        assert_eq!(termination_attempts(1), 1);
        assert_eq!(termination_attempts(2), 2);
        assert_eq!(termination_attempts(3), 2);
        assert_eq!(termination_attempts(65), 5);
    }
}
