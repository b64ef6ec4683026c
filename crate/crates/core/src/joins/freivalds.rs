use rand::Rng;

use super::JoinError;
use crate::f2core::{ceil_log2, BitMatrix, BitVector, F2Error};
use crate::ledger::{CommLedger, Direction};

/// `⌈log₂(100·n)⌉`, the default number of rounds.
pub fn freivalds_repetitions(n: usize) -> u32 {
    ceil_log2(100 * n.max(1) as u64)
}

/// One deterministic round: the columns `j` with `(vᵀA)B[·,j] = 1`.
///
/// Every flagged column of `AB` is nonzero; a nonzero column is flagged for
/// exactly half of all `v`.
pub fn freivalds_round(a: &BitMatrix, b: &BitMatrix, v: &BitVector) -> Result<BitVector, F2Error> {
    let va = a.left_mul_vector(v)?;
    b.left_mul_vector(&va)
}

/// Detects which columns of `AB` are nonzero, Alice holding `A` and Bob `B`.
///
/// Each round Alice draws `v` uniformly, sends `vᵀA`, and Bob answers with
/// `vᵀAB`; a column is reported once any round flags it. A nonzero column is
/// missed with probability `2^{−repetitions}`, and a zero column is never
/// reported.
pub fn freivalds_columns<R: Rng + ?Sized>(
    a: &BitMatrix,
    b: &BitMatrix,
    repetitions: u32,
    ledger: &mut CommLedger,
    rng: &mut R,
) -> Result<Vec<usize>, JoinError> {
    if a.cols() != b.rows() {
        return Err(F2Error::DimensionMismatch {
            left: (a.rows(), a.cols()),
            right: (b.rows(), b.cols()),
        }
        .into());
    }
    let mut flagged = BitVector::zeros(b.cols());
    for _ in 0..repetitions {
        let v = BitVector::random(a.rows(), 0.5, rng);
        ledger.charge_bits(Direction::AliceToBob, a.cols() as u64, "freivalds")?;
        ledger.charge_bits(Direction::BobToAlice, b.cols() as u64, "freivalds")?;
        flagged.or_assign(&freivalds_round(a, b, &v)?)?;
    }
    Ok(flagged.ones_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;

    #[test]
    fn zero_product_never_flags() {
        let mut rng = seeds::rng(0);
        let a = BitMatrix::random(8, 8, 0.5, &mut rng);
        let b = BitMatrix::zeros(8, 8);
        let mut ledger = CommLedger::new();
        let s = freivalds_columns(&a, &b, 10, &mut ledger, &mut rng).unwrap();
        assert!(s.is_empty());
        assert_eq!(ledger.totals().classical_bits, 10 * 16);
    }

    #[test]
    fn single_round_detects_half_of_all_v() {
        // m = 3, AB has exactly one nonzero column (column 1)
        let a = BitMatrix::from_bools(&[&[true, false], &[true, true], &[false, true]]).unwrap();
        let b = BitMatrix::from_bools(&[&[false, true, false], &[false, true, false]]).unwrap();
        let ab = a.f2_product(&b).unwrap();
        assert_eq!(ab.column_weights().iter().filter(|&&w| w > 0).count(), 1);
        let mut hits = 0;
        for bits in 0u8..8 {
            let v = BitVector::from_bools(&[bits & 1 == 1, bits & 2 == 2, bits & 4 == 4]);
            let flagged = freivalds_round(&a, &b, &v).unwrap();
            assert!(!flagged.get(0) && !flagged.get(2));
            hits += usize::from(flagged.get(1));
        }
        assert_eq!(hits, 4);
    }

    #[test]
    fn default_rounds_find_exact_column_set() {
        let n = 64;
        let mut exact = 0;
        for seed in 0..100 {
            let mut rng = seeds::rng(seed);
            let a = BitMatrix::random(n, n, 0.05, &mut rng);
            let b = BitMatrix::random(n, n, 0.02, &mut rng);
            let truth: Vec<usize> = a
                .f2_product(&b)
                .unwrap()
                .column_weights()
                .iter()
                .enumerate()
                .filter(|(_, &w)| w > 0)
                .map(|(j, _)| j)
                .collect();
            let mut ledger = CommLedger::new();
            let got = freivalds_columns(&a, &b, freivalds_repetitions(n), &mut ledger, &mut rng).unwrap();
            assert!(got.iter().all(|j| truth.contains(j)));
            exact += usize::from(got == truth);
        }
        assert!(exact >= 99, "exact={exact}");
    }

    #[test]
    fn dimension_mismatch() {
        let mut ledger = CommLedger::new();
        let r = freivalds_columns(
            &BitMatrix::zeros(3, 4),
            &BitMatrix::zeros(5, 3),
            1,
            &mut ledger,
            &mut seeds::rng(0),
        );
        assert!(matches!(r, Err(JoinError::F2(F2Error::DimensionMismatch { .. }))));
    }
}
