use rand::seq::SliceRandom;
use rand::Rng;

use super::plan::GroverPlan;
use super::state::SearchState;
use super::{charge_bits_nonzero, charge_qubits_split, CostModel, Mode, QsimError};
use crate::f2core::{ceil_log2, BitVector};
use crate::ledger::{CommLedger, Direction};

/// What a search run did, beyond its answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOutcome {
    pub found: Option<usize>,
    /// Iterations charged, summed over attempts.
    pub iterations: u64,
    /// Measurements (exact mode) or simulated runs (cost-model mode).
    pub attempts: u32,
}

/// Protocol-specific charging and verification used by the search engine.
pub(crate) trait SearchHooks {
    /// Charges `k ≥ 1` applications of the distributed reflection.
    fn charge_iterations(&mut self, k: u64, ledger: &mut CommLedger) -> Result<(), QsimError>;

    /// Checks a measured candidate, charging whatever the check costs.
    fn verify<R: Rng + ?Sized>(
        &mut self,
        i: usize,
        ledger: &mut CommLedger,
        rng: &mut R,
    ) -> Result<bool, QsimError>;
}

/// Runs the plan on a simulated register until a candidate verifies.
pub(crate) fn amplify_exact<H: SearchHooks, R: Rng + ?Sized>(
    n: usize,
    marked: &BitVector,
    support: &[usize],
    plan: &GroverPlan,
    ledger: &mut CommLedger,
    rng: &mut R,
    hooks: &mut H,
) -> Result<SearchOutcome, QsimError> {
    let mut state = SearchState::uniform_over(n, support)?;
    // With nothing marked both reflections fix |π(S)⟩, so iterating is a no-op.
    let any_marked = support.iter().any(|&i| marked.get(i));
    let mut out = SearchOutcome {
        found: None,
        iterations: 0,
        attempts: 0,
    };
    for stage in plan.stages() {
        for _ in 0..stage.repetitions {
            let k = rng.gen_range(stage.lo..stage.hi);
            state.reset();
            if any_marked {
                for _ in 0..k {
                    state.iterate(marked);
                }
            }
            if k > 0 {
                hooks.charge_iterations(k, ledger)?;
            }
            out.iterations += k;
            out.attempts += 1;
            let i = state.measure(rng);
            if hooks.verify(i, ledger, rng)? {
                out.found = Some(i);
                return Ok(out);
            }
        }
    }
    Ok(out)
}

/// Computes the answer classically and charges `⌈c·√(|S|/(t+1))⌉` iterations;
/// a present answer is dropped with probability `ε`.
pub(crate) fn amplify_cost_model<H: SearchHooks, R: Rng + ?Sized>(
    marked: &BitVector,
    support: &[usize],
    model: &CostModel,
    ledger: &mut CommLedger,
    rng: &mut R,
    hooks: &mut H,
) -> Result<SearchOutcome, QsimError> {
    if support.is_empty() {
        return Err(QsimError::EmptySupport);
    }
    let hits: Vec<usize> = support.iter().copied().filter(|&i| marked.get(i)).collect();
    let k = model.scaled_iterations((support.len() as f64 / (hits.len() + 1) as f64).sqrt());
    hooks.charge_iterations(k, ledger)?;
    let mut out = SearchOutcome {
        found: None,
        iterations: k,
        attempts: 1,
    };
    let dropped = rng.gen_bool(model.epsilon);
    if let Some(&i) = hits.choose(rng) {
        if !dropped && hooks.verify(i, ledger, rng)? {
            out.found = Some(i);
        }
    }
    Ok(out)
}

/// Plain distributed search: the driver holds the support, the other party
/// holds the marked set.
struct PlainHooks<'a> {
    n: usize,
    shuttle: u64,
    driver: Direction,
    marked: &'a BitVector,
}

impl SearchHooks for PlainHooks<'_> {
    fn charge_iterations(&mut self, k: u64, ledger: &mut CommLedger) -> Result<(), QsimError> {
        charge_qubits_split(ledger, self.driver, 2 * k * self.shuttle, "grover-shuttle")?;
        Ok(())
    }

    fn verify<R: Rng + ?Sized>(
        &mut self,
        i: usize,
        ledger: &mut CommLedger,
        _rng: &mut R,
    ) -> Result<bool, QsimError> {
        charge_bits_nonzero(ledger, self.driver, u64::from(ceil_log2(self.n as u64)), "verify")?;
        ledger.charge_bits(self.driver.reverse(), 1, "verify")?;
        Ok(self.marked.get(i))
    }
}

/// Distributed Grover search for an index of `support` set in `marked`.
///
/// `driver` prepares `|π(support)⟩` and applies the local reflection; the
/// other party applies the phase oracle. Every iteration shuttles the
/// register there and back, and every measured candidate is confirmed by
/// sending it over and receiving one bit, so a returned index is always
/// marked.
#[allow(clippy::too_many_arguments)]
pub fn grover_search<R: Rng + ?Sized>(
    n: usize,
    marked: &BitVector,
    support: &[usize],
    plan: &GroverPlan,
    driver: Direction,
    model: &CostModel,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<SearchOutcome, QsimError> {
    if marked.len() != n {
        return Err(QsimError::LengthMismatch {
            left: marked.len(),
            right: n,
        });
    }
    let mut hooks = PlainHooks {
        n,
        shuttle: model.shuttle_qubits(n),
        driver,
        marked,
    };
    match model.mode {
        Mode::Exact => amplify_exact(n, marked, support, plan, ledger, rng, &mut hooks),
        Mode::CostModel => {
            if let Some(&index) = support.iter().find(|&&i| i >= n) {
                return Err(QsimError::SupportOutOfRange { index, n });
            }
            amplify_cost_model(marked, support, model, ledger, rng, &mut hooks)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::Kind;
    use crate::seeds;

    fn run(
        n: usize,
        marked: &BitVector,
        support: &[usize],
        plan: &GroverPlan,
        seed: u64,
    ) -> (SearchOutcome, CommLedger) {
        let mut ledger = CommLedger::new();
        let out = grover_search(
            n,
            marked,
            support,
            plan,
            Direction::AliceToBob,
            &CostModel::exact(),
            &mut ledger,
            &mut seeds::rng(seed),
        )
        .unwrap();
        (out, ledger)
    }

    #[test]
    fn nothing_marked_runs_full_plan() {
        let support: Vec<usize> = (0..16).collect();
        let plan = GroverPlan::adaptive(16);
        let (out, ledger) = run(16, &BitVector::zeros(16), &support, &plan, 3);
        assert_eq!(out.found, None);
        let attempts: u32 = plan.stages().iter().map(|s| s.repetitions).sum();
        assert_eq!(out.attempts, attempts);
        assert_eq!(ledger.totals().qubits, out.iterations * 2 * 4);
    }

    #[test]
    fn all_marked_found_without_iterations() {
        let support = [2, 3, 7];
        let marked = BitVector::from_indices(8, support);
        let (out, ledger) = run(8, &marked, &support, &GroverPlan::adaptive(3), 0);
        assert!(support.contains(&out.found.unwrap()));
        // the first stage only allows k = 0
        assert_eq!(out.iterations, 0);
        assert_eq!(ledger.totals().qubits, 0);
        assert_eq!(ledger.totals().classical_bits, 3 + 1);
    }

    #[test]
    fn found_index_is_always_marked() {
        let marked = BitVector::from_indices(64, [5, 40]);
        let support: Vec<usize> = (0..64).step_by(5).collect();
        let plan = GroverPlan::adaptive(support.len());
        let mut hits = 0;
        for seed in 0..300 {
            let (out, ledger) = run(64, &marked, &support, &plan, seed);
            if let Some(i) = out.found {
                assert!(marked.get(i));
                hits += 1;
            }
            let shuttled: u64 = ledger
                .entries()
                .iter()
                .filter(|e| e.kind == Kind::Qubits)
                .map(|e| e.amount)
                .sum();
            assert_eq!(shuttled, out.iterations * 2 * 6);
        }
        assert!(hits >= 280, "hits={hits}");
    }

    #[test]
    fn fixed_optimal_plan_succeeds() {
        // |S| = 4, t = 1: one iteration rotates exactly onto the marked state
        let marked = BitVector::unit(16, 9);
        let support = [1, 5, 9, 13];
        for seed in 0..50 {
            let (out, _) = run(16, &marked, &support, &GroverPlan::fixed(1, 1), seed);
            assert_eq!(out.found, Some(9));
        }
    }

    #[test]
    fn cost_model_charges_theoretical_count() {
        let marked = BitVector::from_indices(256, [3]);
        let support: Vec<usize> = (0..64).collect();
        let model = CostModel::cost_model(1.0, 2.0, 0.0).unwrap();
        let mut ledger = CommLedger::new();
        let out = grover_search(
            256,
            &marked,
            &support,
            &GroverPlan::adaptive(64),
            Direction::BobToAlice,
            &model,
            &mut ledger,
            &mut seeds::rng(1),
        )
        .unwrap();
        assert_eq!(out.found, Some(3));
        // ⌈2·√(64/2)⌉ = 12 iterations, 2·8 qubits each
        assert_eq!(out.iterations, 12);
        assert_eq!(ledger.totals().qubits, 12 * 16);
    }

    #[test]
    fn errors() {
        let mut ledger = CommLedger::new();
        let model = CostModel::exact();
        let r = grover_search(
            8,
            &BitVector::zeros(8),
            &[],
            &GroverPlan::adaptive(1),
            Direction::AliceToBob,
            &model,
            &mut ledger,
            &mut seeds::rng(0),
        );
        assert_eq!(r.unwrap_err(), QsimError::EmptySupport);
        let r = grover_search(
            8,
            &BitVector::zeros(7),
            &[0],
            &GroverPlan::adaptive(1),
            Direction::AliceToBob,
            &model,
            &mut ledger,
            &mut seeds::rng(0),
        );
        assert!(matches!(r, Err(QsimError::LengthMismatch { .. })));
    }
}
