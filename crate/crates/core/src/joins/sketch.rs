use rand::Rng;
use thiserror::Error;

use crate::f2core::{ceil_log2, BitVector};
use crate::seeds::splitmix64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SketchError {
    #[error("vector of length {got} does not fit a sketch over [{n}]")]
    Length { got: usize, n: usize },
    #[error("measurement has {got} cells, sketch expects {expected}")]
    Shape { got: usize, expected: usize },
    #[error("peeling stalled with {residual} nonzero cells")]
    DecodeFailure { residual: usize },
}

/// A linear sketch over F2 for recovering `κ`-sparse vectors of length `n`.
///
/// Coordinate `i` is hashed into one of `2κ` buckets at each of `d` levels.
/// Each bucket stores the parity of its coordinates and the XOR of their
/// indices (`⌈log₂ n⌉` bits), so the whole measurement is an F2-linear image
/// of `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensingSketch {
    n: usize,
    kappa: usize,
    levels: usize,
    level_seeds: Vec<u64>,
    /// `buckets[l·n + i]` is the bucket of coordinate `i` at level `l`.
    buckets: Vec<u32>,
}

/// Measured cells, one per (level, bucket): bit 0 is the parity and the
/// remaining bits the index checksum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measurement {
    cells: Vec<u64>,
}

impl Measurement {
    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn is_zero(&self) -> bool {
        self.cells.iter().all(|&c| c == 0)
    }

    pub fn xor_assign(&mut self, other: &Measurement) {
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a ^= b;
        }
    }
}

impl SensingSketch {
    /// `d = ⌈log₂(100κ)⌉` levels with fresh hash seeds.
    pub fn new<R: Rng + ?Sized>(n: usize, kappa: usize, rng: &mut R) -> Self {
        let kappa = kappa.max(1);
        let levels = ceil_log2(100 * kappa as u64) as usize;
        let level_seeds: Vec<u64> = (0..levels).map(|_| rng.gen()).collect();
        let width = 2 * kappa as u64;
        let mut buckets = Vec::with_capacity(levels * n);
        for &seed in &level_seeds {
            buckets.extend((0..n).map(|i| (splitmix64(seed ^ i as u64) % width) as u32));
        }
        Self {
            n,
            kappa,
            levels,
            level_seeds,
            buckets,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn level_seeds(&self) -> &[u64] {
        &self.level_seeds
    }

    pub fn buckets_per_level(&self) -> usize {
        2 * self.kappa
    }

    pub fn checksum_bits(&self) -> u64 {
        u64::from(ceil_log2(self.n as u64))
    }

    /// Measurement length in bits: `d·2κ·(1 + ⌈log₂ n⌉)`.
    pub fn measurement_bits(&self) -> u64 {
        (self.levels * self.buckets_per_level()) as u64 * (1 + self.checksum_bits())
    }

    fn cell(&self, level: usize, i: usize) -> usize {
        level * self.buckets_per_level() + self.buckets[level * self.n + i] as usize
    }

    fn toggle(&self, cells: &mut [u64], i: usize) {
        let word = 1 | ((i as u64) << 1);
        for l in 0..self.levels {
            cells[self.cell(l, i)] ^= word;
        }
    }

    pub fn zero_measurement(&self) -> Measurement {
        Measurement {
            cells: vec![0; self.levels * self.buckets_per_level()],
        }
    }

    pub fn encode(&self, x: &BitVector) -> Result<Measurement, SketchError> {
        if x.len() != self.n {
            return Err(SketchError::Length {
                got: x.len(),
                n: self.n,
            });
        }
        let mut m = self.zero_measurement();
        for i in x.ones_iter() {
            self.toggle(&mut m.cells, i);
        }
        Ok(m)
    }

    /// Peeling decoder.
    ///
    /// A cell is pure when its parity is 1 and its checksum names an index
    /// that hashes back to that cell. Pure cells are resolved and their index
    /// is removed from every level, until no pure cell remains. Decoding
    /// succeeds iff every cell ends at zero, in which case the result
    /// re-encodes to the measurement.
    pub fn decode(&self, measurement: &Measurement) -> Result<BitVector, SketchError> {
        let expected = self.levels * self.buckets_per_level();
        if measurement.cells.len() != expected {
            return Err(SketchError::Shape {
                got: measurement.cells.len(),
                expected,
            });
        }
        let mut cells = measurement.cells.clone();
        let mut x = BitVector::zeros(self.n);
        let width = self.buckets_per_level();
        let mut queue: Vec<usize> = (0..expected).collect();
        // each resolution toggles d cells; bound the work against cycling
        let mut budget = 4 * expected + 4 * self.kappa * self.levels;
        while let Some(c) = queue.pop() {
            let word = cells[c];
            if word & 1 == 0 {
                continue;
            }
            let i = (word >> 1) as usize;
            if i >= self.n || self.cell(c / width, i) != c {
                continue;
            }
            if budget == 0 {
                break;
            }
            budget -= 1;
            x.flip(i);
            self.toggle(&mut cells, i);
            queue.extend((0..self.levels).map(|l| self.cell(l, i)));
        }
        let residual = cells.iter().filter(|&&c| c != 0).count();
        if residual > 0 {
            return Err(SketchError::DecodeFailure { residual });
        }
        Ok(x)
    }
}
