use rand::seq::index::sample;
use rand::Rng;

use super::{BitMatrix, F2Error};
use crate::seeds;

const MAX_SAMPLING_ATTEMPTS: usize = 100;
/// Planted instances aim for this fraction of the promise bound.
const TARGET_FRACTION: f64 = 0.75;
/// Highest per-entry fill the F2 planting asks for; an F2 entry is a parity and
/// never exceeds 1/2 in probability.
const F2_MAX_FILL: f64 = 0.45;

/// Which product the promise `|A·B| ≤ ℓ` refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semiring {
    /// `A∗B` over (OR, AND).
    Boolean,
    /// `AB` over the two-element field.
    F2,
}

/// A promise instance `(A, B, ℓ)` with its brute-force product cached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinInstance {
    a: BitMatrix,
    b: BitMatrix,
    ell: usize,
    seed: u64,
    semiring: Semiring,
    oracle_product: BitMatrix,
}

impl JoinInstance {
    /// Validates dimensions and the promise, then caches the product.
    ///
    /// `A` must be `m×n` and `B` must be `n×m`.
    pub fn new(
        a: BitMatrix,
        b: BitMatrix,
        ell: usize,
        semiring: Semiring,
        seed: u64,
    ) -> Result<Self, F2Error> {
        if a.cols() != b.rows() || a.rows() != b.cols() {
            return Err(F2Error::DimensionMismatch {
                left: (a.rows(), a.cols()),
                right: (b.rows(), b.cols()),
            });
        }
        let oracle_product = match semiring {
            Semiring::Boolean => a.bool_product(&b)?,
            Semiring::F2 => a.f2_product(&b)?,
        };
        let weight = oracle_product.weight();
        if weight > ell {
            return Err(F2Error::PromiseViolation { weight, ell });
        }
        Ok(Self {
            a,
            b,
            ell,
            seed,
            semiring,
            oracle_product,
        })
    }

    /// Like [`new`](Self::new) but without the promise check, for running
    /// protocols off-promise. Dimensions are still validated and the cached
    /// product is exact.
    pub fn new_unchecked(
        a: BitMatrix,
        b: BitMatrix,
        ell: usize,
        semiring: Semiring,
        seed: u64,
    ) -> Result<Self, F2Error> {
        let weight = match semiring {
            Semiring::Boolean => a.bool_product(&b)?,
            Semiring::F2 => a.f2_product(&b)?,
        }
        .weight();
        Self::new(a, b, ell.max(weight), semiring, seed).map(|mut inst| {
            inst.ell = ell;
            inst
        })
    }

    pub fn a(&self) -> &BitMatrix {
        &self.a
    }

    pub fn b(&self) -> &BitMatrix {
        &self.b
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    /// Output dimension `m` (the product is `m×m`).
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Inner dimension `n`.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn oracle_product(&self) -> &BitMatrix {
        &self.oracle_product
    }

    /// Recomputes the product and checks it against the cached one and the
    /// promise.
    pub fn check_promise(&self) -> Result<(), F2Error> {
        let fresh = match self.semiring {
            Semiring::Boolean => self.a.bool_product(&self.b)?,
            Semiring::F2 => self.a.f2_product(&self.b)?,
        };
        let weight = fresh.weight();
        if fresh != self.oracle_product || weight > self.ell {
            return Err(F2Error::PromiseViolation {
                weight,
                ell: self.ell,
            });
        }
        Ok(())
    }
}

/// Shape of the planted support for F2 instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnProfile {
    /// About `√(2ℓ)` active columns, each well below `√ℓ` nonzeros.
    Spread,
    /// About `√ℓ/2` active columns, each near `1.5√ℓ` nonzeros.
    Dense,
}

struct Plan {
    active_rows: usize,
    active_cols: usize,
    fill: f64,
    lower: usize,
}

/// Samples `A` (nonzero only on `active_rows` rows) and `B` (nonzero only on
/// `active_cols` columns) with entry density tuned so each entry of the
/// `active_rows × active_cols` product block is one with probability `fill`,
/// retrying until the product weight lands in `[plan.lower, ell]`.
fn plant<R: Rng>(
    m: usize,
    n: usize,
    ell: usize,
    semiring: Semiring,
    plan: &Plan,
    rng: &mut R,
) -> Result<(BitMatrix, BitMatrix), F2Error> {
    let inner = n as f64;
    let density = match semiring {
        Semiring::Boolean => (1.0 - (1.0 - plan.fill).powf(1.0 / inner)).sqrt(),
        Semiring::F2 => ((1.0 - (1.0 - 2.0 * plan.fill).powf(1.0 / inner)) / 2.0).sqrt(),
    };
    for _ in 0..MAX_SAMPLING_ATTEMPTS {
        let rows = sample(rng, m, plan.active_rows).into_vec();
        let cols = sample(rng, m, plan.active_cols).into_vec();
        let mut a = BitMatrix::zeros(m, n);
        let mut b = BitMatrix::zeros(n, m);
        for &i in &rows {
            for k in 0..n {
                if rng.gen_bool(density) {
                    a.set(i, k, true);
                }
            }
        }
        for k in 0..n {
            for &j in &cols {
                if rng.gen_bool(density) {
                    b.set(k, j, true);
                }
            }
        }
        let weight = match semiring {
            Semiring::Boolean => a.bool_product(&b)?,
            Semiring::F2 => a.f2_product(&b)?,
        }
        .weight();
        if (plan.lower..=ell).contains(&weight) {
            return Ok((a, b));
        }
    }
    Err(F2Error::SamplingExhausted {
        attempts: MAX_SAMPLING_ATTEMPTS,
    })
}

fn check_params(m: usize, n: usize, ell: usize) -> Result<(), F2Error> {
    if m == 0 || n == 0 {
        return Err(F2Error::Infeasible(format!("dimensions must be positive (m={m}, n={n})")));
    }
    if ell == 0 || ell > m * m {
        return Err(F2Error::Infeasible(format!(
            "need 1 <= ell <= m^2, got ell={ell}, m={m}"
        )));
    }
    Ok(())
}

fn ceil_sqrt(x: usize) -> usize {
    let r = x.isqrt();
    if r * r == x {
        r
    } else {
        r + 1
    }
}

/// A Boolean promise instance `A ∈ {0,1}^{m×n}`, `B ∈ {0,1}^{n×m}` with
/// `|A∗B|` in `[⌈ℓ/2⌉, ℓ]`, planted on `⌈√ℓ⌉` active rows of `A` and columns
/// of `B`. Deterministic in `seed`.
pub fn gen_promise_instance(
    m: usize,
    n: usize,
    ell: usize,
    seed: u64,
) -> Result<JoinInstance, F2Error> {
    check_params(m, n, ell)?;
    let side = ceil_sqrt(ell).min(m);
    let plan = Plan {
        active_rows: side,
        active_cols: side,
        fill: TARGET_FRACTION * ell as f64 / (side * side) as f64,
        lower: ell.div_ceil(2),
    };
    let mut rng = seeds::rng(seed);
    let (a, b) = plant(m, n, ell, Semiring::Boolean, &plan, &mut rng)?;
    JoinInstance::new(a, b, ell, Semiring::Boolean, seed)
}

/// A square F2 promise instance with `|AB| ≤ ℓ`. The weight is aimed at
/// `[⌈ℓ/2⌉, ℓ]` whenever the requested fill is reachable by a parity.
pub fn gen_f2_promise_instance(
    n: usize,
    ell: usize,
    seed: u64,
    profile: ColumnProfile,
) -> Result<JoinInstance, F2Error> {
    check_params(n, n, ell)?;
    let target = TARGET_FRACTION * ell as f64;
    let (rows, cols) = match profile {
        ColumnProfile::Spread => {
            let side = ceil_sqrt(2 * ell).min(n);
            (side, side)
        }
        ColumnProfile::Dense => {
            let cols = ceil_sqrt(ell).div_ceil(2).max(1).min(n);
            let rows = ((target / (0.4 * cols as f64)).ceil() as usize).clamp(1, n);
            (rows, cols)
        }
    };
    let fill = target / (rows * cols) as f64;
    let plan = Plan {
        active_rows: rows,
        active_cols: cols,
        fill: fill.min(F2_MAX_FILL),
        lower: if fill <= F2_MAX_FILL { ell.div_ceil(2) } else { 0 },
    };
    let mut rng = seeds::rng(seed);
    let (a, b) = plant(n, n, ell, Semiring::F2, &plan, &mut rng)?;
    JoinInstance::new(a, b, ell, Semiring::F2, seed)
}

/// An extremal Boolean instance on which the output-sensitive protocol must
/// find many witnesses that each carry a large row/column weight.
///
/// With `L = ⌊√ℓ⌋`, a shared core of `w = max(1, ⌊L/2⌋)` rows `X` and columns
/// `Y` is combined with `a = min(L − w, ⌊√n⌋)` private rows `R` and columns
/// `Q`. Each pair `(r, q) ∈ R × Q` gets its own witness `k` with
/// `A[·,k] = X ∪ {r}` and `B[k,·] = Y ∪ {q}`. The cell `(r, q)` is covered only
/// by its own witness, so all `a²` witnesses are found, and each has
/// `min(|A[·,k]|, |B[k,·]|) = w + 1`. The product is the full
/// `(w+a) × (w+a)` square, at most `ℓ` ones.
pub fn gen_cross_instance(
    m: usize,
    n: usize,
    ell: usize,
    seed: u64,
) -> Result<JoinInstance, F2Error> {
    check_params(m, n, ell)?;
    let side = ell.isqrt().min(m);
    let core = (side / 2).max(1);
    let private = (side - core).min(n.isqrt());
    let mut rng = seeds::rng(seed);
    let rows = sample(&mut rng, m, core + private).into_vec();
    let cols = sample(&mut rng, m, core + private).into_vec();
    let witnesses = sample(&mut rng, n, (private * private).max(1)).into_vec();
    let (core_rows, private_rows) = rows.split_at(core);
    let (core_cols, private_cols) = cols.split_at(core);

    let mut a = BitMatrix::zeros(m, n);
    let mut b = BitMatrix::zeros(n, m);
    let mut place = |k: usize, r: Option<usize>, q: Option<usize>| {
        for &i in core_rows.iter().chain(r.as_ref()) {
            a.set(i, k, true);
        }
        for &j in core_cols.iter().chain(q.as_ref()) {
            b.set(k, j, true);
        }
    };
    if private == 0 {
        place(witnesses[0], None, None);
    } else {
        let pairs = private_rows
            .iter()
            .flat_map(|&r| private_cols.iter().map(move |&q| (r, q)));
        for (&k, (r, q)) in witnesses.iter().zip(pairs) {
            place(k, Some(r), Some(q));
        }
    }
    JoinInstance::new(a, b, ell, Semiring::Boolean, seed)
}
