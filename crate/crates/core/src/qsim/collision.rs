use std::collections::BTreeSet;

use rand::Rng;

use super::disj::weight_handshake;
use super::plan::PlanPolicy;
use super::search::grover_search;
use super::{outcome_bits, termination_attempts, CostModel, QsimError};
use crate::f2core::{BitMatrix, BitVector};
use crate::ledger::{CommLedger, Direction};

/// A bipartite graph on `[left] × [right]` that both parties can query
/// locally.
pub trait BipartiteGraph {
    fn left(&self) -> usize;
    fn right(&self) -> usize;
    fn has_edge(&self, i: usize, j: usize) -> bool;
}

/// Edges are the one-entries of the matrix.
#[derive(Debug, Clone, Copy)]
pub struct AdjacencyMatrix<'a>(pub &'a BitMatrix);

impl BipartiteGraph for AdjacencyMatrix<'_> {
    fn left(&self) -> usize {
        self.0.rows()
    }
    fn right(&self) -> usize {
        self.0.cols()
    }
    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.0.get(i, j)
    }
}

/// Edges are the zero-entries of the matrix.
#[derive(Debug, Clone, Copy)]
pub struct ComplementGraph<'a>(pub &'a BitMatrix);

impl BipartiteGraph for ComplementGraph<'_> {
    fn left(&self) -> usize {
        self.0.rows()
    }
    fn right(&self) -> usize {
        self.0.cols()
    }
    fn has_edge(&self, i: usize, j: usize) -> bool {
        !self.0.get(i, j)
    }
}

/// `inner` minus a set of edges already reported.
struct Excluding<'g, G> {
    inner: &'g G,
    excluded: &'g BTreeSet<(usize, usize)>,
}

impl<G: BipartiteGraph> BipartiteGraph for Excluding<'_, G> {
    fn left(&self) -> usize {
        self.inner.left()
    }
    fn right(&self) -> usize {
        self.inner.right()
    }
    fn has_edge(&self, i: usize, j: usize) -> bool {
        self.inner.has_edge(i, j) && !self.excluded.contains(&(i, j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcOutcome {
    None,
    Collision { i: usize, j: usize },
}

fn check_shapes<G: BipartiteGraph>(g: &G, fa: &BitVector, fb: &BitVector) -> Result<(), QsimError> {
    if fa.len() != g.left() {
        return Err(QsimError::LengthMismatch {
            left: fa.len(),
            right: g.left(),
        });
    }
    if fb.len() != g.right() {
        return Err(QsimError::LengthMismatch {
            left: fb.len(),
            right: g.right(),
        });
    }
    Ok(())
}

/// One collision search after the handshake.
///
/// If Alice drives, Bob marks `b = {i : ∃j, (i,j) ∈ G, f_B(j) = 1}` and the
/// search runs over `f_A`; on success Bob names a partner `j`. Otherwise the
/// roles swap.
#[allow(clippy::too_many_arguments)]
fn collision_search<G: BipartiteGraph, R: Rng + ?Sized>(
    g: &G,
    fa: &[usize],
    fb: &[usize],
    driver: Direction,
    attempts: u32,
    model: &CostModel,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<Option<(usize, usize)>, QsimError> {
    let (domain, support, partners) = match driver {
        Direction::AliceToBob => (g.left(), fa, fb),
        Direction::BobToAlice => (g.right(), fb, fa),
    };
    let edge = |x: usize, y: usize| match driver {
        Direction::AliceToBob => g.has_edge(x, y),
        Direction::BobToAlice => g.has_edge(y, x),
    };
    let mut marked = BitVector::zeros(domain);
    for &x in support {
        if partners.iter().any(|&y| edge(x, y)) {
            marked.set(x, true);
        }
    }
    let plan = PlanPolicy::Adaptive.plan(support.len());
    for _ in 0..attempts {
        let out = grover_search(domain, &marked, support, &plan, driver, model, ledger, rng)?;
        if let Some(x) = out.found {
            let y = *partners
                .iter()
                .find(|&&y| edge(x, y))
                .expect("a verified index has a partner");
            let partner_domain = match driver {
                Direction::AliceToBob => g.right(),
                Direction::BobToAlice => g.left(),
            };
            ledger.charge_bits(driver.reverse(), outcome_bits(partner_domain), "gc-report")?;
            return Ok(Some(match driver {
                Direction::AliceToBob => (x, y),
                Direction::BobToAlice => (y, x),
            }));
        }
    }
    Ok(None)
}

/// Graph collision: finds `(i, j) ∈ G` with `f_A(i) = f_B(j) = 1` by a
/// disjointness search on the derived sets. A reported edge is always a
/// genuine collision.
pub fn graph_collision<G: BipartiteGraph, R: Rng + ?Sized>(
    g: &G,
    fa: &BitVector,
    fb: &BitVector,
    model: &CostModel,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<GcOutcome, QsimError> {
    check_shapes(g, fa, fb)?;
    let (sa, sb) = (fa.ones_vec(), fb.ones_vec());
    let driver = weight_handshake(g.left().max(g.right()), sa.len(), sb.len(), ledger)?;
    if sa.is_empty() || sb.is_empty() {
        return Ok(GcOutcome::None);
    }
    Ok(
        match collision_search(g, &sa, &sb, driver, 1, model, ledger, rng)? {
            Some((i, j)) => GcOutcome::Collision { i, j },
            None => GcOutcome::None,
        },
    )
}

/// Finds all collisions by repeated search, striking each reported edge from
/// the graph. Each search is retried up to
/// `termination_attempts(|f_A|·|f_B| + 1)` times before the loop concludes.
/// Returns the sorted edge list.
pub fn graph_collision_all<G: BipartiteGraph, R: Rng + ?Sized>(
    g: &G,
    fa: &BitVector,
    fb: &BitVector,
    model: &CostModel,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<Vec<(usize, usize)>, QsimError> {
    check_shapes(g, fa, fb)?;
    let (sa, sb) = (fa.ones_vec(), fb.ones_vec());
    let driver = weight_handshake(g.left().max(g.right()), sa.len(), sb.len(), ledger)?;
    let mut excluded = BTreeSet::new();
    if sa.is_empty() || sb.is_empty() {
        return Ok(Vec::new());
    }
    let attempts = termination_attempts(sa.len() * sb.len() + 1);
    loop {
        let view = Excluding {
            inner: g,
            excluded: &excluded,
        };
        match collision_search(&view, &sa, &sb, driver, attempts, model, ledger, rng)? {
            Some(edge) => {
                excluded.insert(edge);
            }
            None => break,
        }
    }
    Ok(excluded.into_iter().collect())
}

/// All collisions by exhaustive scan; the reference for tests.
pub fn collisions_oracle<G: BipartiteGraph>(g: &G, fa: &BitVector, fb: &BitVector) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in fa.ones_iter() {
        for j in fb.ones_iter() {
            if g.has_edge(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}
