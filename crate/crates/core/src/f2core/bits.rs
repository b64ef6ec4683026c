//! Bit-packed vectors and matrices over F2.
//!
//! The same storage doubles as a Boolean 0/1 matrix: [`BitMatrix::bool_product`]
//! multiplies over the (OR, AND) semiring and [`BitMatrix::f2_product`] over the
//! two-element field. Bit `i` of a vector lives in word `i / 64` at position
//! `i % 64`; padding bits past `len` are always zero.

use std::fmt;

use rand::Rng;

use super::F2Error;

const WORD_BITS: usize = 64;

#[inline]
fn word_count(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A dense bit vector over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; word_count(len)],
        };
        v.clear_padding();
        v
    }

    /// The unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len` with ones at `indices`.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    /// Parses a string of `'0'`/`'1'` characters, index 0 first.
    pub fn parse01(s: &str) -> Result<Self, F2Error> {
        let s = s.trim();
        let mut v = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(F2Error::Parse(format!(
                        "unexpected character {other:?} in bit string"
                    )))
                }
            }
        }
        Ok(v)
    }

    /// Independent Bernoulli(`density`) entries.
    pub fn random<R: Rng + ?Sized>(len: usize, density: f64, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if rng.gen_bool(density) {
                v.set(i, true);
            }
        }
        v
    }

    /// A uniformly random vector with exactly `weight` ones.
    pub fn random_with_weight<R: Rng + ?Sized>(len: usize, weight: usize, rng: &mut R) -> Self {
        assert!(weight <= len, "weight {weight} exceeds length {len}");
        Self::from_indices(len, rand::seq::index::sample(rng, len, weight))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of the set bits in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + tz)
                }
            })
        })
    }

    pub fn ones_vec(&self) -> Vec<usize> {
        self.ones_iter().collect()
    }

    fn check_len(&self, other: &Self) -> Result<(), F2Error> {
        if self.len != other.len {
            return Err(F2Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    pub fn xor_assign(&mut self, other: &Self) -> Result<(), F2Error> {
        self.check_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn or_assign(&mut self, other: &Self) -> Result<(), F2Error> {
        self.check_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(())
    }

    pub fn and(&self, other: &Self) -> Result<Self, F2Error> {
        self.check_len(other)?;
        Ok(Self {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        })
    }

    /// Inner product over F2.
    pub fn dot(&self, other: &Self) -> Result<bool, F2Error> {
        self.check_len(other)?;
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    /// Whether the supports of the two vectors meet.
    pub fn intersects(&self, other: &Self) -> Result<bool, F2Error> {
        self.check_len(other)?;
        Ok(self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0))
    }

    /// Concatenation, `self` first.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.ones_iter() {
            out.set(i, true);
        }
        for i in other.ones_iter() {
            out.set(self.len + i, true);
        }
        out
    }

    fn clear_padding(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.len);
        }
    }

    /// Whether all bits past `len` are zero. Always true for values built
    /// through this API.
    pub fn padding_is_clear(&self) -> bool {
        self.words
            .last()
            .is_none_or(|&w| w & !tail_mask(self.len) == 0)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A row-major bit-packed matrix over F2 (or the Boolean semiring).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = word_count(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        let row = BitVector::ones(cols);
        for i in 0..rows {
            m.row_words_mut(i).copy_from_slice(row.words());
        }
        m
    }

    /// Builds a matrix from row vectors of equal length.
    pub fn from_rows(rows: &[BitVector]) -> Result<Self, F2Error> {
        let cols = rows.first().map_or(0, BitVector::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.set_row(i, r)?;
        }
        Ok(m)
    }

    /// Builds a matrix from nested 0/1 literals.
    pub fn from_bools(rows: &[&[bool]]) -> Result<Self, F2Error> {
        let vecs: Vec<BitVector> = rows.iter().map(|r| BitVector::from_bools(r)).collect();
        Self::from_rows(&vecs)
    }

    /// Independent Bernoulli(`density`) entries.
    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, density: f64, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if rng.gen_bool(density) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of range");
        (self.data[i * self.stride + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of range");
        let mask = 1u64 << (j % WORD_BITS);
        let w = &mut self.data[i * self.stride + j / WORD_BITS];
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    pub fn column(&self, j: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn set_row(&mut self, i: usize, row: &BitVector) -> Result<(), F2Error> {
        if row.len() != self.cols {
            return Err(F2Error::LengthMismatch {
                left: self.cols,
                right: row.len(),
            });
        }
        self.row_words_mut(i).copy_from_slice(row.words());
        Ok(())
    }

    pub fn set_column(&mut self, j: usize, column: &BitVector) -> Result<(), F2Error> {
        if column.len() != self.rows {
            return Err(F2Error::LengthMismatch {
                left: self.rows,
                right: column.len(),
            });
        }
        for i in 0..self.rows {
            self.set(i, j, column.get(i));
        }
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row_ones(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Number of ones in the matrix.
    pub fn weight(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut out = vec![0; self.cols];
        for i in 0..self.rows {
            for j in self.row_ones(i) {
                out[j] += 1;
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Column indices of the ones in row `i`.
    pub fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(i)
            .iter()
            .enumerate()
            .flat_map(|(wi, &word)| {
                let mut w = word;
                std::iter::from_fn(move || {
                    if w == 0 {
                        None
                    } else {
                        let tz = w.trailing_zeros() as usize;
                        w &= w - 1;
                        Some(wi * WORD_BITS + tz)
                    }
                })
            })
    }

    /// All `(row, column)` positions holding a one, row-major.
    pub fn ones_positions(&self) -> Vec<(usize, usize)> {
        (0..self.rows)
            .flat_map(|i| self.row_ones(i).map(move |j| (i, j)))
            .collect()
    }

    fn check_inner(&self, other: &Self) -> Result<(), F2Error> {
        if self.cols != other.rows {
            return Err(F2Error::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// Boolean product `A∗B` by packed row-OR accumulation.
    pub fn bool_product(&self, other: &Self) -> Result<Self, F2Error> {
        self.check_inner(other)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = i * out.stride;
            for k in self.row_ones(i) {
                let src = other.row_words(k);
                for (d, s) in out.data[dst..dst + out.stride].iter_mut().zip(src) {
                    *d |= s;
                }
            }
        }
        Ok(out)
    }

    /// Product over F2 by packed row-XOR accumulation.
    pub fn f2_product(&self, other: &Self) -> Result<Self, F2Error> {
        self.check_inner(other)?;
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = i * out.stride;
            for k in self.row_ones(i) {
                let src = other.row_words(k);
                for (d, s) in out.data[dst..dst + out.stride].iter_mut().zip(src) {
                    *d ^= s;
                }
            }
        }
        Ok(out)
    }

    /// Row-vector times matrix over F2: `vᵀ M`.
    pub fn left_mul_vector(&self, v: &BitVector) -> Result<BitVector, F2Error> {
        if v.len() != self.rows {
            return Err(F2Error::LengthMismatch {
                left: self.rows,
                right: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.cols);
        for k in v.ones_iter() {
            for (d, s) in out.words.iter_mut().zip(self.row_words(k)) {
                *d ^= s;
            }
        }
        Ok(out)
    }

    /// Matrix times column vector over F2: `M z`.
    pub fn mul_vector(&self, z: &BitVector) -> Result<BitVector, F2Error> {
        if z.len() != self.cols {
            return Err(F2Error::LengthMismatch {
                left: self.cols,
                right: z.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            let ones: u32 = self
                .row_words(i)
                .iter()
                .zip(z.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if ones % 2 == 1 {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// The submatrix made of the listed rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), self.cols);
        for (dst, &src) in rows.iter().enumerate() {
            let words = self.row_words(src).to_vec();
            out.row_words_mut(dst).copy_from_slice(&words);
        }
        out
    }

    /// Entrywise OR.
    pub fn or_assign(&mut self, other: &Self) -> Result<(), F2Error> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(F2Error::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a |= b;
        }
        Ok(())
    }

    /// Copies `block` into this matrix with its top-left corner at `(row, col)`.
    pub fn paste(&mut self, row: usize, col: usize, block: &Self) -> Result<(), F2Error> {
        if row + block.rows > self.rows || col + block.cols > self.cols {
            return Err(F2Error::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (row + block.rows, col + block.cols),
            });
        }
        for i in 0..block.rows {
            for j in block.row_ones(i) {
                self.set(row + i, col + j, true);
            }
        }
        Ok(())
    }

    /// The `rows × cols` block whose top-left corner is `(row, col)`.
    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if self.get(row + i, col + j) {
                    out.set(i, j, true);
                }
            }
        }
        out
    }

    pub fn padding_is_clear(&self) -> bool {
        if self.cols.is_multiple_of(WORD_BITS) {
            return true;
        }
        let mask = !tail_mask(self.cols);
        (0..self.rows).all(|i| self.row_words(i)[self.stride - 1] & mask == 0)
    }

    /// Serializes to the text format: a `rows cols` header line followed by one
    /// line of `'0'`/`'1'` characters per row.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses the text format written by [`BitMatrix::to_text`]. Blank lines
    /// are ignored.
    pub fn from_text(text: &str) -> Result<Self, F2Error> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| F2Error::Parse("missing dimension header".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| F2Error::Parse(format!("bad dimension {t:?}")))
            })
            .collect::<Result<_, _>>()?;
        let [rows, cols] = dims[..] else {
            return Err(F2Error::Parse(format!("header {header:?} is not \"rows cols\"")));
        };
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| F2Error::Parse(format!("missing row {i}")))?;
            let row = BitVector::parse01(line)?;
            if row.len() != cols {
                return Err(F2Error::Parse(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            m.set_row(i, &row)?;
        }
        if let Some(extra) = lines.next() {
            return Err(F2Error::Parse(format!("trailing line {extra:?}")));
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.row(i))?;
        }
        write!(f, "]")
    }
}
