use rand::Rng;

use super::plan::PlanPolicy;
use super::search::grover_search;
use super::{announce_bits, termination_attempts, CostModel, QsimError};
use crate::f2core::BitVector;
use crate::ledger::{CommLedger, Direction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisjOutcome {
    Disjoint,
    Intersecting { witness: usize },
}

impl DisjOutcome {
    /// The set-disjointness output bit: 1 iff an intersection was found.
    pub fn bit(&self) -> u8 {
        match self {
            DisjOutcome::Disjoint => 0,
            DisjOutcome::Intersecting { .. } => 1,
        }
    }
}

fn check_lengths(a: &BitVector, b: &BitVector) -> Result<(), QsimError> {
    if a.len() != b.len() {
        return Err(QsimError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(())
}

/// Both parties announce their weights; the lighter side (Alice on ties)
/// drives the search.
pub(crate) fn weight_handshake(
    n: usize,
    weight_a: usize,
    weight_b: usize,
    ledger: &mut CommLedger,
) -> Result<Direction, QsimError> {
    let bits = announce_bits(n);
    ledger.charge_bits(Direction::AliceToBob, bits, "handshake")?;
    ledger.charge_bits(Direction::BobToAlice, bits, "handshake")?;
    Ok(if weight_a <= weight_b {
        Direction::AliceToBob
    } else {
        Direction::BobToAlice
    })
}

/// Set disjointness with the adaptive iteration schedule.
pub fn disj<R: Rng + ?Sized>(
    a: &BitVector,
    b: &BitVector,
    model: &CostModel,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<DisjOutcome, QsimError> {
    disj_with_policy(a, b, &PlanPolicy::Adaptive, model, ledger, rng)
}

/// Set disjointness: after the weight handshake the lighter party searches
/// its own set for an element of the other's. A reported witness always lies
/// in `a ∩ b`.
pub fn disj_with_policy<R: Rng + ?Sized>(
    a: &BitVector,
    b: &BitVector,
    policy: &PlanPolicy,
    model: &CostModel,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<DisjOutcome, QsimError> {
    check_lengths(a, b)?;
    let n = a.len();
    let driver = weight_handshake(n, a.weight(), b.weight(), ledger)?;
    let (own, other) = match driver {
        Direction::AliceToBob => (a, b),
        Direction::BobToAlice => (b, a),
    };
    let support = own.ones_vec();
    if support.is_empty() {
        return Ok(DisjOutcome::Disjoint);
    }
    let plan = policy.plan(support.len());
    let out = grover_search(n, other, &support, &plan, driver, model, ledger, rng)?;
    Ok(match out.found {
        Some(witness) => DisjOutcome::Intersecting { witness },
        None => DisjOutcome::Disjoint,
    })
}

/// Find-all set intersection: repeatedly finds a common element and strikes
/// it from the driver's set until a search comes back empty.
///
/// Each search is retried until it has failed `termination_attempts(min+1)`
/// times, so that all of the at most `min(|a|,|b|) + 1` calls hold jointly
/// with probability at least 2/3. Returns the sorted intersection.
pub fn disj_all<R: Rng + ?Sized>(
    a: &BitVector,
    b: &BitVector,
    model: &CostModel,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<Vec<usize>, QsimError> {
    check_lengths(a, b)?;
    let n = a.len();
    let driver = weight_handshake(n, a.weight(), b.weight(), ledger)?;
    let (own, other) = match driver {
        Direction::AliceToBob => (a, b),
        Direction::BobToAlice => (b, a),
    };
    let mut remaining = own.ones_vec();
    let attempts = termination_attempts(remaining.len() + 1);
    let mut found = Vec::new();
    while !remaining.is_empty() {
        let plan = PlanPolicy::Adaptive.plan(remaining.len());
        let mut hit = None;
        for _ in 0..attempts {
            let out = grover_search(n, other, &remaining, &plan, driver, model, ledger, rng)?;
            if out.found.is_some() {
                hit = out.found;
                break;
            }
        }
        let Some(i) = hit else { break };
        found.push(i);
        remaining.retain(|&x| x != i);
    }
    found.sort_unstable();
    Ok(found)
}
