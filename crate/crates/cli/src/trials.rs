//! One trial of each protocol: build the instance from the trial seed, run
//! the protocol against a fresh ledger, and check the output against the
//! oracle.

use std::time::Instant;

use qjoin::f2core::{gen_cross_instance, gen_f2_promise_instance, gen_promise_instance, ColumnProfile};
use qjoin::joins::{bmm, bmm_cost_model, mm_f2};
use qjoin::qsim::{disj, graph_collision, AdjacencyMatrix, CostModel, DisjOutcome, GcOutcome, Mode};
use qjoin::{seeds, BitMatrix, BitVector, CommLedger};
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    /// Output-sensitive BMM on planted promise instances.
    Bmm,
    /// F2 matrix multiplication.
    MmF2,
    /// Set disjointness; `ell` is the intersection size.
    Disj,
    /// Graph collision; `ell` is the number of planted collisions.
    Gc,
    /// BMM on the extremal cross instances used for scaling fits.
    BmmCross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
}

/// One row of the results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cell: Cell,
    pub mode: Mode,
    pub seed: u64,
    pub success: bool,
    pub classical_bits: u64,
    pub qubits: u64,
    /// Messages recorded in the ledger.
    pub rounds: u64,
    pub wall_time_ms: f64,
}

pub const CSV_HEADER: &str = "n,m,ell,mode,seed,success,classical_bits,qubits,rounds,wall_time_ms";

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::CostModel => "cost-model",
    }
}

impl Row {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.cell.n,
            self.cell.m,
            self.cell.ell,
            mode_name(self.mode),
            self.seed,
            u8::from(self.success),
            self.classical_bits,
            self.qubits,
            self.rounds,
            if self.wall_time_ms == 0.0 {
                "0".to_string()
            } else {
                format!("{:.3}", self.wall_time_ms)
            }
        )
    }
}

/// Set sizes used by the disjointness and graph-collision trials.
pub fn side(n: usize, ell: usize) -> usize {
    n.isqrt().max(1).max(ell)
}

fn profile(trial: u64) -> ColumnProfile {
    if trial.is_multiple_of(2) {
        ColumnProfile::Spread
    } else {
        ColumnProfile::Dense
    }
}

fn run_disj<R: Rng>(cell: Cell, model: &CostModel, ledger: &mut CommLedger, rng: &mut R) -> Result<bool, String> {
    // a = C ∪ A', b = C ∪ B' with |C| = ℓ and A', B' disjoint
    let (n, t) = (cell.n, cell.ell);
    let s = side(n, t);
    let idx = sample(rng, n, 2 * s - t).into_vec();
    let a = BitVector::from_indices(n, idx[..s].iter().copied());
    let b = BitVector::from_indices(n, idx[s - t..].iter().copied());
    Ok(match disj(&a, &b, model, ledger, rng).map_err(|e| e.to_string())? {
        DisjOutcome::Disjoint => t == 0,
        DisjOutcome::Intersecting { witness } => a.get(witness) && b.get(witness),
    })
}

fn run_gc<R: Rng>(cell: Cell, model: &CostModel, ledger: &mut CommLedger, rng: &mut R) -> Result<bool, String> {
    // ℓ edges inside f_A × f_B, noise edges everywhere else
    let n = cell.n;
    let s = side(n, 0);
    let fa = BitVector::from_indices(n, sample(rng, n, s));
    let fb = BitVector::from_indices(n, sample(rng, n, s));
    let mut g = BitMatrix::random(n, n, 0.1, rng);
    for i in fa.ones_iter() {
        for j in fb.ones_iter() {
            g.set(i, j, false);
        }
    }
    let (ia, ib) = (fa.ones_vec(), fb.ones_vec());
    for p in sample(rng, s * s, cell.ell) {
        g.set(ia[p / s], ib[p % s], true);
    }
    Ok(
        match graph_collision(&AdjacencyMatrix(&g), &fa, &fb, model, ledger, rng).map_err(|e| e.to_string())? {
            GcOutcome::None => cell.ell == 0,
            GcOutcome::Collision { i, j } => fa.get(i) && fb.get(j) && g.get(i, j),
        },
    )
}

/// Runs one trial; the instance and the protocol draw from streams derived
/// from `seed`. F2 instances alternate column profiles by `trial` parity.
pub fn run_trial(
    protocol: Protocol,
    cell: Cell,
    model: &CostModel,
    trial: u64,
    seed: u64,
    timing: bool,
) -> Result<(Row, CommLedger), String> {
    let mut ledger = CommLedger::new();
    let mut rng = seeds::rng(seeds::splitmix64(seed));
    let start = Instant::now();
    let err = |e: &dyn std::fmt::Display| format!("n={} m={} ell={} seed={seed}: {e}", cell.n, cell.m, cell.ell);
    let success = match protocol {
        Protocol::Bmm | Protocol::BmmCross => {
            let inst = if protocol == Protocol::Bmm {
                gen_promise_instance(cell.m, cell.n, cell.ell, seed)
            } else {
                gen_cross_instance(cell.m, cell.n, cell.ell, seed)
            }
            .map_err(|e| err(&e))?;
            let product = if model.is_exact() {
                bmm(&inst, model, &mut ledger, &mut rng).map_err(|e| err(&e))?.product
            } else {
                bmm_cost_model(&inst, model, &mut ledger, &mut rng)
                    .map_err(|e| err(&e))?
                    .trace
                    .product
            };
            &product == inst.oracle_product()
        }
        Protocol::MmF2 => {
            let inst = gen_f2_promise_instance(cell.n, cell.ell, seed, profile(trial)).map_err(|e| err(&e))?;
            let out = mm_f2(&inst, &mut ledger, &mut rng).map_err(|e| err(&e))?;
            &out.product == inst.oracle_product()
        }
        Protocol::Disj => run_disj(cell, model, &mut ledger, &mut rng).map_err(|e| err(&e))?,
        Protocol::Gc => run_gc(cell, model, &mut ledger, &mut rng).map_err(|e| err(&e))?,
    };
    let wall_time_ms = if timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
    let totals = ledger.totals();
    let row = Row {
        cell,
        mode: model.mode,
        seed,
        success,
        classical_bits: totals.classical_bits,
        qubits: totals.qubits,
        rounds: ledger.entries().len() as u64,
        wall_time_ms,
    };
    Ok((row, ledger))
}

/// All `(cell, trial)` pairs in parallel, returned in `(cell, trial)` order.
/// Trial `t` of cell `c` uses the seed `derive(seed, c, t)`.
pub fn run_grid(
    protocol: Protocol,
    cells: &[Cell],
    trials: u64,
    model: &CostModel,
    seed: u64,
    timing: bool,
) -> Result<Vec<(Row, CommLedger)>, String> {
    let jobs: Vec<(usize, u64)> = (0..cells.len())
        .flat_map(|c| (0..trials).map(move |t| (c, t)))
        .collect();
    jobs.into_par_iter()
        .map(|(c, t)| run_trial(protocol, cells[c], model, t, seeds::derive(seed, c as u64, t), timing))
        .collect()
}
