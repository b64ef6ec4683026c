use rand::seq::SliceRandom;
use rand::Rng;

use super::bmm::{covers_zero, BmmRound, BmmTrace};
use super::JoinError;
use crate::f2core::{BitMatrix, BitVector, JoinInstance};
use crate::ledger::{CommLedger, Direction, Totals};
use crate::qsim::{index_qubits, CostModel};

/// Result of [`bmm_cost_model`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModelRun {
    pub trace: BmmTrace,
    pub totals: Totals,
}

fn charge(ledger: &mut CommLedger, amount: f64, phase: &str) -> Result<(), JoinError> {
    let q = (amount.ceil() as u64).max(1);
    let there = q.div_ceil(2);
    ledger.charge_qubits(Direction::AliceToBob, there, phase)?;
    if q > there {
        ledger.charge_qubits(Direction::BobToAlice, q - there, phase)?;
    }
    Ok(())
}

/// Runs the BMM control flow classically and charges the analysed cost.
///
/// Each round picks a uniformly random witness `k` whose column and row
/// still cover a zero of `C`, and adds all of those zeros (`λ_i` of them).
/// Once the number of rounds `t` is known, round `i` is charged
/// `⌈c·√(n/(t−i+1))·√w_i·L⌉` qubits for the search and `⌈c·√(λ_i·w_i)·L⌉` for
/// find-all. Here `w_i = min(|A[·,k_i]|, |B[k_i,·]|)`, `L = max(1, ⌈log₂ m⌉)`
/// and `c = c_round·c_shuttle`. A final empty search costs `⌈c·√n·L⌉`.
pub fn bmm_cost_model<R: Rng + ?Sized>(
    instance: &JoinInstance,
    model: &CostModel,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<CostModelRun, JoinError> {
    model.validate()?;
    let (m, n, ell) = (instance.m(), instance.n(), instance.ell());
    let c_const = model.c_round * model.c_shuttle;
    let log_m = index_qubits(m) as f64;
    let a_cols: Vec<BitVector> = (0..n).map(|k| instance.a().column(k)).collect();
    let b_rows: Vec<BitVector> = (0..n).map(|k| instance.b().row(k)).collect();

    let mut c = BitMatrix::zeros(m, m);
    // a witness never revives once C covers it
    let mut live: Vec<usize> = (0..n)
        .filter(|&k| !a_cols[k].is_zero() && !b_rows[k].is_zero())
        .collect();
    let mut rounds = Vec::new();
    loop {
        live.retain(|&k| covers_zero(&c, &a_cols[k], &b_rows[k]));
        let Some(&k) = live.choose(rng) else { break };
        let (fa, fb) = (&a_cols[k], &b_rows[k]);
        let mut lambda = 0;
        for i in fa.ones_iter() {
            for j in fb.ones_iter() {
                if !c.get(i, j) {
                    c.set(i, j, true);
                    lambda += 1;
                }
            }
        }
        rounds.push(BmmRound {
            witness: k,
            collisions: lambda,
            min_weight: fa.weight().min(fb.weight()),
            cost: Totals::default(),
        });
        if c.weight() > ell {
            return Err(JoinError::PromiseViolation {
                found: c.weight(),
                ell,
            });
        }
    }

    let t = rounds.len();
    let mut run_ledger = ledger.sibling();
    for (idx, round) in rounds.iter_mut().enumerate() {
        let mut round_ledger = run_ledger.sibling();
        let w = round.min_weight as f64;
        let remaining = (t - idx) as f64;
        charge(
            &mut round_ledger,
            c_const * (n as f64 / remaining).sqrt() * w.sqrt() * log_m,
            "bmm-search",
        )?;
        charge(
            &mut round_ledger,
            c_const * (round.collisions as f64 * w).sqrt() * log_m,
            "bmm-find-all",
        )?;
        round.cost = round_ledger.totals();
        run_ledger.append(&round_ledger);
    }
    charge(&mut run_ledger, c_const * (n as f64).sqrt() * log_m, "bmm-search")?;
    ledger.append(&run_ledger);
    Ok(CostModelRun {
        totals: run_ledger.totals(),
        trace: BmmTrace { rounds, product: c },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2core::{gen_cross_instance, gen_promise_instance, Semiring};
    use crate::seeds;

    fn unit_model() -> CostModel {
        CostModel::cost_model(1.0, 1.0, 0.0).unwrap()
    }

    fn run(inst: &JoinInstance, model: &CostModel, seed: u64) -> CostModelRun {
        let mut ledger = CommLedger::new();
        bmm_cost_model(inst, model, &mut ledger, &mut seeds::rng(seed)).unwrap()
    }

    #[test]
    fn empty_product_costs_one_failed_search() {
        let inst = JoinInstance::new(
            BitMatrix::zeros(16, 64),
            BitMatrix::ones(64, 16),
            1,
            Semiring::Boolean,
            0,
        )
        .unwrap();
        let out = run(&inst, &unit_model(), 0);
        assert_eq!(out.trace.t(), 0);
        // √64 · ⌈log₂ 16⌉
        assert_eq!(out.totals.qubits, 8 * 4);
        let doubled = run(&inst, &CostModel::cost_model(2.0, 1.0, 0.0).unwrap(), 0);
        assert_eq!(doubled.totals.qubits, 2 * 8 * 4);
    }

    #[test]
    fn single_witness_single_collision() {
        let mut a = BitMatrix::zeros(16, 64);
        let mut b = BitMatrix::zeros(64, 16);
        a.set(3, 10, true);
        b.set(10, 7, true);
        let inst = JoinInstance::new(a, b, 1, Semiring::Boolean, 0).unwrap();
        let out = run(&inst, &unit_model(), 0);
        assert_eq!(out.trace.t(), 1);
        assert_eq!(out.trace.rounds[0].collisions, 1);
        // round: (√64 + 1)·√1·4, then the terminating search √64·4
        assert_eq!(out.trace.rounds[0].cost.qubits, (8 + 1) * 4);
        assert_eq!(out.totals.qubits, (8 + 1) * 4 + 8 * 4);
    }

    #[test]
    fn output_is_exact_and_invariants_hold() {
        for seed in 0..50 {
            let inst = gen_promise_instance(32, 64, 64, seed).unwrap();
            let out = run(&inst, &unit_model(), seed);
            assert_eq!(&out.trace.product, inst.oracle_product());
            out.trace.check_invariants(inst.n(), inst.ell()).unwrap();
        }
    }

    #[test]
    fn cross_instance_rounds() {
        let inst = gen_cross_instance(64, 4096, 256, 1).unwrap();
        let out = run(&inst, &unit_model(), 1);
        assert_eq!(out.trace.t(), 64);
        assert_eq!(out.trace.product.weight(), 256);
        out.trace.check_invariants(inst.n(), inst.ell()).unwrap();
    }

    #[test]
    fn promise_violation() {
        let inst = JoinInstance::new_unchecked(
            BitMatrix::ones(4, 4),
            BitMatrix::ones(4, 4),
            3,
            Semiring::Boolean,
            0,
        )
        .unwrap();
        let mut ledger = CommLedger::new();
        let r = bmm_cost_model(&inst, &unit_model(), &mut ledger, &mut seeds::rng(0));
        assert!(matches!(r, Err(JoinError::PromiseViolation { .. })));
    }
}
