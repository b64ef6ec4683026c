use rand::Rng;

use super::{JoinError, BMM_EXACT_CAP};
use crate::f2core::{BitMatrix, BitVector, JoinInstance};
use crate::ledger::{CommLedger, Direction, Totals};
use crate::qsim::{
    announce_bits, graph_collision, graph_collision_all, index_qubits, instance_search,
    outcome_bits, termination_attempts, ComplementGraph, CostModel, GcOutcome, GroverPlan,
    InstanceFamily, Mode, QsimError,
};

/// One round of the protocol: a witness and the new ones it produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmmRound {
    pub witness: usize,
    /// `λ_i`, the entries added to `C` in this round.
    pub collisions: usize,
    /// `min(|A[·,k]|, |B[k,·]|)` for the witness.
    pub min_weight: usize,
    /// Communication charged during the round.
    pub cost: Totals,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BmmTrace {
    pub rounds: Vec<BmmRound>,
    /// The accumulated output `C`.
    pub product: BitMatrix,
}

impl BmmTrace {
    /// Number of witnesses found.
    pub fn t(&self) -> usize {
        self.rounds.len()
    }

    /// Checks `Σλ_i = |C|`, `t ≤ min(n, ℓ+1)` and `min-weight ≤ √ℓ` for every
    /// witness.
    pub fn check_invariants(&self, n: usize, ell: usize) -> Result<(), String> {
        let sum: usize = self.rounds.iter().map(|r| r.collisions).sum();
        if sum != self.product.weight() {
            return Err(format!("Σλ = {sum} but |C| = {}", self.product.weight()));
        }
        if self.t() > n.min(ell + 1) {
            return Err(format!("t = {} exceeds min(n, ℓ+1)", self.t()));
        }
        if let Some(r) = self.rounds.iter().find(|r| r.min_weight * r.min_weight > ell) {
            return Err(format!("witness {} has min-weight {} > √{ell}", r.witness, r.min_weight));
        }
        Ok(())
    }
}

/// Whether some `i ∈ f_A`, `j ∈ f_B` has `C[i,j] = 0`.
pub(crate) fn covers_zero(c: &BitMatrix, fa: &BitVector, fb: &BitVector) -> bool {
    fa.ones_iter().any(|i| {
        c.row_words(i)
            .iter()
            .zip(fb.words())
            .any(|(&row, &f)| f & !row != 0)
    })
}

/// Communication of one coherent graph-collision run on `[m]` whose lighter
/// side has `w` elements.
fn coherent_gc_cost(m: usize, w: usize) -> u64 {
    let handshake = 2 * announce_bits(m);
    if w == 0 {
        return handshake;
    }
    let q = index_qubits(m);
    handshake + 2 * q * GroverPlan::cap(w) + q + 1 + outcome_bits(m)
}

/// Instance `k` is "does `(A[·,k], B[k,·])` collide in the complement of `C`".
struct WitnessFamily<'a> {
    a_cols: &'a [BitVector],
    b_rows: &'a [BitVector],
    c: &'a BitMatrix,
    coherent: u64,
}

impl InstanceFamily for WitnessFamily<'_> {
    type Witness = (usize, usize);

    fn len(&self) -> usize {
        self.a_cols.len()
    }

    fn is_marked(&self, k: usize) -> bool {
        covers_zero(self.c, &self.a_cols[k], &self.b_rows[k])
    }

    fn coherent_cost(&self) -> u64 {
        self.coherent
    }

    fn run<R: Rng + ?Sized>(
        &self,
        k: usize,
        model: &CostModel,
        ledger: &mut CommLedger,
        rng: &mut R,
    ) -> Result<Option<(usize, usize)>, QsimError> {
        let g = ComplementGraph(self.c);
        Ok(
            match graph_collision(&g, &self.a_cols[k], &self.b_rows[k], model, ledger, rng)? {
                GcOutcome::Collision { i, j } => Some((i, j)),
                GcOutcome::None => None,
            },
        )
    }
}

/// Output-sensitive Boolean matrix multiplication.
///
/// Both parties keep the same `C`, initially zero. Each round searches
/// `k ∈ [n]` for a witness that still collides in the complement of `C`
/// (amplitude amplification over graph-collision instances), then finds all
/// its collisions and adds them to `C`. Every added entry was verified, so
/// `C` never holds a spurious one. The loop ends after a search that finds
/// nothing, retried `termination_attempts(ℓ+1)` times, and aborts with
/// [`JoinError::PromiseViolation`] as soon as `C` exceeds `ℓ` ones.
pub fn bmm<R: Rng + ?Sized>(
    instance: &JoinInstance,
    model: &CostModel,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<BmmTrace, JoinError> {
    let (m, n, ell) = (instance.m(), instance.n(), instance.ell());
    if model.mode == Mode::Exact && n > BMM_EXACT_CAP {
        return Err(JoinError::ExactCap {
            n,
            cap: BMM_EXACT_CAP,
        });
    }
    let a_cols: Vec<BitVector> = (0..n).map(|k| instance.a().column(k)).collect();
    let b_rows: Vec<BitVector> = (0..n).map(|k| instance.b().row(k)).collect();
    let coherent = a_cols
        .iter()
        .zip(&b_rows)
        .map(|(fa, fb)| coherent_gc_cost(m, fa.weight().min(fb.weight())))
        .max()
        .unwrap_or(0);
    let attempts = termination_attempts(ell + 1);

    let mut c = BitMatrix::zeros(m, m);
    let mut rounds = Vec::new();
    loop {
        let mut round_ledger = ledger.sibling();
        let mut found = None;
        for _ in 0..attempts {
            let family = WitnessFamily {
                a_cols: &a_cols,
                b_rows: &b_rows,
                c: &c,
                coherent,
            };
            found = instance_search(&family, Direction::AliceToBob, model, &mut round_ledger, rng)?;
            if found.is_some() {
                break;
            }
        }
        let Some((k, (i, j))) = found else {
            ledger.append(&round_ledger);
            break;
        };
        let (fa, fb) = (&a_cols[k], &b_rows[k]);
        let edges = graph_collision_all(&ComplementGraph(&c), fa, fb, model, &mut round_ledger, rng)?;
        let before = c.weight();
        c.set(i, j, true);
        for (x, y) in edges {
            c.set(x, y, true);
        }
        let weight = c.weight();
        ledger.append(&round_ledger);
        rounds.push(BmmRound {
            witness: k,
            collisions: weight - before,
            min_weight: fa.weight().min(fb.weight()),
            cost: round_ledger.totals(),
        });
        if weight > ell {
            return Err(JoinError::PromiseViolation { found: weight, ell });
        }
    }
    Ok(BmmTrace { rounds, product: c })
}
