use rand::seq::index::sample;
use rand::Rng;

use super::freivalds::freivalds_round;
use super::sketch::{Measurement, SensingSketch};
use super::JoinError;
use crate::f2core::{ceil_log2, BitMatrix, BitVector, JoinInstance};
use crate::ledger::{CommLedger, Direction};

/// Repetition counts and sparsity bound of [`mm_f2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmF2Params {
    /// Row-sample repetitions of the dense-column test.
    pub r1: u32,
    /// Freivalds rounds run on each row sample.
    pub sample_rounds: u32,
    /// Sketch repetitions for the sparse columns.
    pub r3: u32,
    /// Sparsity bound `κ` of the sketch.
    pub kappa: usize,
}

impl MmF2Params {
    /// `r₁ = ⌈3·log₂ n⌉` row samples with two Freivalds rounds each,
    /// `r₃ = ⌈log₂(100n)⌉`, `κ = ⌈1.1·√ℓ⌉`.
    pub fn for_instance(n: usize, ell: usize) -> Self {
        Self {
            r1: (3.0 * (n.max(2) as f64).log2()).ceil() as u32,
            sample_rounds: 2,
            r3: ceil_log2(100 * n.max(1) as u64),
            kappa: (1.1 * (ell.max(1) as f64).sqrt()).ceil() as usize,
        }
    }
}

/// Split of the product columns into dense (transferred) and sparse
/// (sketched) ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnClassification {
    /// `S`, the columns treated as dense, ascending.
    pub dense: Vec<usize>,
    /// `0.9·√ℓ`: columns in `S` should have at least this many nonzeros.
    pub lower: f64,
    /// `1.1·√ℓ`: columns with at least this many nonzeros should be in `S`.
    pub upper: f64,
    /// Times each column was flagged during the test.
    pub flag_counts: Vec<u32>,
    /// Flag count a column needs to enter `S`.
    pub threshold: f64,
}

impl ColumnClassification {
    /// `⌈ℓ / (0.9·√ℓ)⌉`, the most dense columns a promise instance can have.
    pub fn size_bound(ell: usize) -> usize {
        let ell = ell.max(1) as f64;
        (ell / (0.9 * ell.sqrt())).ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmF2Outcome {
    pub product: BitMatrix,
    pub classification: ColumnClassification,
    /// Sketches sent in step 3.
    pub sketch_repetitions: u32,
    /// Columns that fell back to direct transfer after sketching.
    pub fallback_columns: usize,
}

/// Probability that `q` rows drawn without replacement from `n` hit at least
/// one of `d` marked rows, with `d` allowed to be fractional.
fn hit_probability(n: usize, q: usize, d: f64) -> f64 {
    let mut miss = 1.0;
    for i in 0..q {
        let num = n as f64 - d - i as f64;
        if num <= 0.0 {
            return 1.0;
        }
        miss *= num / (n - i) as f64;
    }
    1.0 - miss
}

/// Step 1: each repetition samples `⌈n/√ℓ⌉` rows of `A` and runs `s`
/// Freivalds rounds on them. A column with `d` nonzeros is flagged with
/// probability `p(d)·(1 − 2^{−s})`, `p` the chance the sample hits one of
/// them; `S` is the set of columns flagged more often than the midpoint
/// between the rates at `0.9√ℓ` and `1.1√ℓ` nonzeros.
fn classify<R: Rng + ?Sized>(
    a: &BitMatrix,
    b: &BitMatrix,
    ell: usize,
    params: &MmF2Params,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<ColumnClassification, JoinError> {
    let r1 = params.r1;
    let rounds = params.sample_rounds.max(1);
    let n = a.rows();
    let root = (ell.max(1) as f64).sqrt();
    let q = ((n as f64 / root).ceil() as usize).clamp(1, n);
    let mut flag_counts = vec![0u32; b.cols()];
    for _ in 0..r1 {
        let rows = sample(rng, n, q).into_vec();
        let sub = a.select_rows(&rows);
        let mut flagged = BitVector::zeros(b.cols());
        for _ in 0..rounds {
            let v = BitVector::random(q, 0.5, rng);
            ledger.charge_bits(Direction::AliceToBob, a.cols() as u64, "freivalds")?;
            ledger.charge_bits(Direction::BobToAlice, b.cols() as u64, "freivalds")?;
            flagged.or_assign(&freivalds_round(&sub, b, &v)?)?;
        }
        for j in flagged.ones_iter() {
            flag_counts[j] += 1;
        }
    }
    let (lower, upper) = (0.9 * root, 1.1 * root);
    let detect = 1.0 - 0.5f64.powi(rounds as i32);
    let rate = 0.5 * detect * (hit_probability(n, q, lower) + hit_probability(n, q, upper));
    let threshold = rate * f64::from(r1);
    let dense = flag_counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| f64::from(c) >= threshold)
        .map(|(j, _)| j)
        .collect();
    Ok(ColumnClassification {
        dense,
        lower,
        upper,
        flag_counts,
        threshold,
    })
}

/// Classical F2 matrix multiplication for square promise instances,
/// `|AB| ≤ ℓ`, with the default parameters.
pub fn mm_f2<R: Rng + ?Sized>(
    instance: &JoinInstance,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<MmF2Outcome, JoinError> {
    let params = MmF2Params::for_instance(instance.n(), instance.ell());
    mm_f2_with(instance, &params, ledger, rng)
}

/// Classical F2 matrix multiplication in three steps:
///
/// 1. classify the columns of `AB` as dense or sparse (see the row-sampled
///    Freivalds test above), `2n` bits per Freivalds round;
/// 2. Bob sends the dense columns of `B`, `n` bits each, and Alice multiplies;
/// 3. Alice sends `MA` for a fresh sparse-recovery sketch `M`
///    (`measurement_bits·n` bits), and Bob decodes each sparse column
///    `A·B[·,j]` from `MA·B[·,j]`. Columns that fail are retried with a new
///    sketch, or sent directly once that is cheaper than another sketch.
pub fn mm_f2_with<R: Rng + ?Sized>(
    instance: &JoinInstance,
    params: &MmF2Params,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<MmF2Outcome, JoinError> {
    let (a, b) = (instance.a(), instance.b());
    let n = a.rows();
    for m in [a, b] {
        if m.rows() != m.cols() || m.rows() != n {
            return Err(JoinError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
    }
    let ell = instance.ell();
    let classification = classify(a, b, ell, params, ledger, rng)?;
    let b_cols: Vec<BitVector> = (0..n).map(|j| b.column(j)).collect();
    let mut product = BitMatrix::zeros(n, n);

    let transfer = |cols: &[usize], ledger: &mut CommLedger, product: &mut BitMatrix| {
        if !cols.is_empty() {
            ledger.charge_bits(Direction::BobToAlice, (cols.len() * n) as u64, "dense-transfer")?;
        }
        for &j in cols {
            product.set_column(j, &a.mul_vector(&b_cols[j])?)?;
        }
        Ok::<(), JoinError>(())
    };
    transfer(&classification.dense, ledger, &mut product)?;

    let mut is_dense = vec![false; n];
    for &j in &classification.dense {
        is_dense[j] = true;
    }
    let mut pending: Vec<usize> = (0..n).filter(|&j| !is_dense[j] && !b_cols[j].is_zero()).collect();
    let a_cols: Vec<BitVector> = (0..n).map(|c| a.column(c)).collect();
    let mut reps = 0;
    let mut fallback_columns = 0;
    while !pending.is_empty() {
        if reps == params.r3 {
            return Err(JoinError::DecodeBudget {
                columns: pending.len(),
                repetitions: reps,
            });
        }
        reps += 1;
        let sketch = SensingSketch::new(n, params.kappa, rng);
        ledger.charge_bits(Direction::AliceToBob, sketch.measurement_bits() * n as u64, "sketch")?;
        let ma: Vec<Measurement> = a_cols
            .iter()
            .map(|col| sketch.encode(col))
            .collect::<Result<_, _>>()
            .expect("columns of A have length n");
        let mut failed = Vec::new();
        for &j in &pending {
            let mut y = sketch.zero_measurement();
            for c in b_cols[j].ones_iter() {
                y.xor_assign(&ma[c]);
            }
            match sketch.decode(&y) {
                Ok(col) => product.set_column(j, &col)?,
                Err(_) => failed.push(j),
            }
        }
        pending = failed;
        if !pending.is_empty() && (pending.len() as u64) < sketch.measurement_bits() {
            fallback_columns = pending.len();
            transfer(&pending, ledger, &mut product)?;
            pending.clear();
        }
    }
    let found = product.weight();
    if found > ell {
        return Err(JoinError::PromiseViolation { found, ell });
    }
    Ok(MmF2Outcome {
        product,
        classification,
        sketch_repetitions: reps,
        fallback_columns,
    })
}
