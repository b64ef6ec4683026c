//! Bit-packed F2 linear algebra, promise instances and their generators.

mod bits;
mod instance;

pub use bits::{BitMatrix, BitVector};
pub use instance::{
    gen_cross_instance, gen_f2_promise_instance, gen_promise_instance, ColumnProfile,
    JoinInstance, Semiring,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum F2Error {
    #[error("dimension mismatch: {left:?} cannot be combined with {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("infeasible instance parameters: {0}")]
    Infeasible(String),
    #[error("promise violated: product has {weight} ones, bound is {ell}")]
    PromiseViolation { weight: usize, ell: usize },
    #[error("instance sampling gave up after {attempts} attempts")]
    SamplingExhausted { attempts: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// `⌈log₂ x⌉` for `x ≥ 1`, and 0 for `x ≤ 1`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::ceil_log2;

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(0), 0);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(16), 4);
        assert_eq!(ceil_log2(17), 5);
        assert_eq!(ceil_log2(1 << 20), 20);
    }
}
