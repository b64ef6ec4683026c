//! Lower-bound embeddings as checkable instance generators.
//!
//! Each constructor packs inputs of a source problem (set disjointness,
//! inner product, OR of small BMM instances) into a [`JoinInstance`] whose
//! product exposes the source answer through an exact algebraic identity.
//! [`Embedding::validate`] checks that identity with the brute-force oracles,
//! never with a protocol.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::f2core::{BitMatrix, BitVector, F2Error, JoinInstance, Semiring};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("{k} instances do not fit in dimension {n}")]
    TooManyInstances { k: usize, n: usize },
    #[error("input vector has length {got}, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("{len} positions do not fit an {n}x{n} matrix")]
    LayoutOverflow { len: usize, n: usize },
    #[error("block {index} is {rows}x{cols}, expected {side}x{side}")]
    BlockShape {
        index: usize,
        rows: usize,
        cols: usize,
        side: usize,
    },
    #[error("{k} blocks of side {side} overflow dimension {n}")]
    DimensionOverflow { k: usize, side: usize, n: usize },
    #[error("{construction}: {detail}")]
    IdentityFailed {
        construction: Construction,
        detail: String,
    },
    #[error("embedding parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    F2(#[from] F2Error),
}

/// The four embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Construction {
    /// `k` disjointness instances on the diagonal of a Boolean product.
    DisjFamily,
    /// An inner-product input laid out against `B = I`.
    InnerProduct,
    /// `k` small Boolean products OR-ed into the top-left block.
    OrBlocks,
    /// `k` inner products summed along the diagonal of an F2 product.
    IpF2,
}

impl Construction {
    pub const ALL: [Construction; 4] = [
        Construction::DisjFamily,
        Construction::InnerProduct,
        Construction::OrBlocks,
        Construction::IpF2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::DisjFamily => "disj-family",
            Construction::InnerProduct => "inner-product",
            Construction::OrBlocks => "or-blocks",
            Construction::IpF2 => "ip-f2",
        }
    }

    /// The identity the validator checks.
    pub fn identity(self) -> &'static str {
        match self {
            Construction::DisjFamily => "(A∗B)[i,i] = [a_i ∩ b_i ≠ ∅] for i < k, |A∗B| ≤ k²",
            Construction::InnerProduct => "A∗I = A, and ⊕_p C[pos(p)]∧b_p = a·b",
            Construction::OrBlocks => "top-left block of A∗B = ⋁ A_i∗B_i, |A∗B| ≤ side²",
            Construction::IpF2 => "⊕_i (AB)[i,i] = ⊕_i x_i·y_i, |AB| ≤ k²",
        }
    }

    /// A random embedding at the sizes used by the validation runs: `n = 32,
    /// k = 4` for disj-family, `n = 8, ℓ = 30` for inner-product, side 4 and
    /// `n = 16` for or-blocks, `n = 16, k = 3` for ip-f2.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> Result<Embedding, ReductionError> {
        // vary the density so both answers of each source problem show up
        let density = rng.gen_range(0.02..0.5);
        match self {
            Construction::DisjFamily => {
                let a = random_vectors(4, 32, density, rng);
                let b = random_vectors(4, 32, density, rng);
                embed_disj_family(&a, &b, 32)
            }
            Construction::InnerProduct => {
                let a = BitVector::random(30, density, rng);
                let b = BitVector::random(30, 0.5, rng);
                embed_inner_product(&a, &b, 8)
            }
            Construction::OrBlocks => {
                let blocks: Vec<_> = (0..4)
                    .map(|_| {
                        (
                            BitMatrix::random(4, 4, density, rng),
                            BitMatrix::random(4, 4, density, rng),
                        )
                    })
                    .collect();
                embed_or_blocks(&blocks, 16)
            }
            Construction::IpF2 => {
                let x = random_vectors(3, 16, density, rng);
                let y = random_vectors(3, 16, density, rng);
                embed_ip_f2(&x, &y, 16)
            }
        }
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ReductionError::Parse(format!("unknown construction {s:?}")))
    }
}

fn random_vectors<R: Rng + ?Sized>(k: usize, n: usize, density: f64, rng: &mut R) -> Vec<BitVector> {
    (0..k).map(|_| BitVector::random(n, density, rng)).collect()
}

/// The source-problem inputs an embedding encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    DisjFamily { a: Vec<BitVector>, b: Vec<BitVector> },
    /// `a` sits at `positions[p]` of `A`; `b` stays with Bob.
    InnerProduct {
        a: BitVector,
        b: BitVector,
        positions: Vec<(usize, usize)>,
    },
    OrBlocks { blocks: Vec<(BitMatrix, BitMatrix)> },
    IpF2 { x: Vec<BitVector>, y: Vec<BitVector> },
}

impl Payload {
    pub fn construction(&self) -> Construction {
        match self {
            Payload::DisjFamily { .. } => Construction::DisjFamily,
            Payload::InnerProduct { .. } => Construction::InnerProduct,
            Payload::OrBlocks { .. } => Construction::OrBlocks,
            Payload::IpF2 { .. } => Construction::IpF2,
        }
    }
}

/// A join instance together with the inputs it encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    instance: JoinInstance,
    payload: Payload,
}

/// Row-major layout of the first `len` cells of an `n×n` matrix.
pub fn row_major_layout(len: usize, n: usize) -> Vec<(usize, usize)> {
    (0..len).map(|p| (p / n, p % n)).collect()
}

fn check_family(k: usize, n: usize, vectors: &[&[BitVector]]) -> Result<(), ReductionError> {
    if k > n {
        return Err(ReductionError::TooManyInstances { k, n });
    }
    for v in vectors.iter().flat_map(|vs| vs.iter()) {
        if v.len() != n {
            return Err(ReductionError::Length {
                got: v.len(),
                expected: n,
            });
        }
    }
    Ok(())
}

/// Rows `a_i` of `A` and columns `b_i` of `B`, both `n×n`.
fn rows_and_columns(a: &[BitVector], b: &[BitVector], n: usize) -> Result<(BitMatrix, BitMatrix), F2Error> {
    let mut ma = BitMatrix::zeros(n, n);
    let mut mb = BitMatrix::zeros(n, n);
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        ma.set_row(i, x)?;
        mb.set_column(i, y)?;
    }
    Ok((ma, mb))
}

/// Embeds `k ≤ n` disjointness instances: `A` has `a_i` as row `i`, `B` has
/// `b_i` as column `i`, and `(A∗B)[i,i]` is 1 iff `a_i` and `b_i` intersect.
/// The instance promises `|A∗B| ≤ k²`.
pub fn embed_disj_family(a: &[BitVector], b: &[BitVector], n: usize) -> Result<Embedding, ReductionError> {
    let k = a.len();
    if b.len() != k {
        return Err(ReductionError::Length {
            got: b.len(),
            expected: k,
        });
    }
    check_family(k, n, &[a, b])?;
    let (ma, mb) = rows_and_columns(a, b, n)?;
    Ok(Embedding {
        instance: JoinInstance::new(ma, mb, k * k, Semiring::Boolean, 0)?,
        payload: Payload::DisjFamily {
            a: a.to_vec(),
            b: b.to_vec(),
        },
    })
}

/// Embeds an inner-product input of length `ℓ ≤ n²`: `A` carries `a`
/// row-major from `(0,0)` and `B = I`, so Bob learns `A` from the output and
/// computes `a·b` locally.
pub fn embed_inner_product(a: &BitVector, b: &BitVector, n: usize) -> Result<Embedding, ReductionError> {
    let len = a.len();
    if b.len() != len {
        return Err(ReductionError::Length {
            got: b.len(),
            expected: len,
        });
    }
    if len > n * n {
        return Err(ReductionError::LayoutOverflow { len, n });
    }
    let positions = row_major_layout(len, n);
    let mut ma = BitMatrix::zeros(n, n);
    for p in a.ones_iter() {
        let (i, j) = positions[p];
        ma.set(i, j, true);
    }
    Ok(Embedding {
        instance: JoinInstance::new(ma, BitMatrix::identity(n), len, Semiring::Boolean, 0)?,
        payload: Payload::InnerProduct {
            a: a.clone(),
            b: b.clone(),
            positions,
        },
    })
}

/// Embeds `k` Boolean products of `s×s` blocks with `k·s ≤ n`: the top `s`
/// rows of `A` are `[A_1 … A_k | 0]` and the left `s` columns of `B` are
/// `[B_1; …; B_k; 0]`, so the top-left block of `A∗B` is `⋁ A_i∗B_i` and the
/// rest is zero. The instance promises `|A∗B| ≤ s²`.
pub fn embed_or_blocks(blocks: &[(BitMatrix, BitMatrix)], n: usize) -> Result<Embedding, ReductionError> {
    let k = blocks.len();
    let side = blocks.first().map_or(0, |(a, _)| a.rows());
    for (index, m) in blocks.iter().flat_map(|(a, b)| [a, b]).enumerate() {
        if m.rows() != side || m.cols() != side {
            return Err(ReductionError::BlockShape {
                index: index / 2,
                rows: m.rows(),
                cols: m.cols(),
                side,
            });
        }
    }
    if k * side > n {
        return Err(ReductionError::DimensionOverflow { k, side, n });
    }
    let mut ma = BitMatrix::zeros(n, n);
    let mut mb = BitMatrix::zeros(n, n);
    for (i, (a, b)) in blocks.iter().enumerate() {
        ma.paste(0, i * side, a)?;
        mb.paste(i * side, 0, b)?;
    }
    Ok(Embedding {
        instance: JoinInstance::new(ma, mb, side * side, Semiring::Boolean, 0)?,
        payload: Payload::OrBlocks {
            blocks: blocks.to_vec(),
        },
    })
}

/// Embeds `k ≤ n` inner products over F2: `A` has `x_i` as row `i`, `B` has
/// `y_j` as column `j`, and the parity of the diagonal of `AB` is the
/// concatenated inner product `x·y`. The instance promises `|AB| ≤ k²`.
pub fn embed_ip_f2(x: &[BitVector], y: &[BitVector], n: usize) -> Result<Embedding, ReductionError> {
    let k = x.len();
    if y.len() != k {
        return Err(ReductionError::Length {
            got: y.len(),
            expected: k,
        });
    }
    check_family(k, n, &[x, y])?;
    let (ma, mb) = rows_and_columns(x, y, n)?;
    Ok(Embedding {
        instance: JoinInstance::new(ma, mb, k * k, Semiring::F2, 0)?,
        payload: Payload::IpF2 {
            x: x.to_vec(),
            y: y.to_vec(),
        },
    })
}

fn parity(bits: impl IntoIterator<Item = bool>) -> bool {
    bits.into_iter().fold(false, |acc, b| acc ^ b)
}

impl Embedding {
    pub fn instance(&self) -> &JoinInstance {
        &self.instance
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn construction(&self) -> Construction {
        self.payload.construction()
    }

    /// `a·b` as Bob reads it off the product; `None` for the other
    /// constructions.
    pub fn read_inner_product(&self) -> Option<bool> {
        let Payload::InnerProduct { b, positions, .. } = &self.payload else {
            return None;
        };
        let c = self.instance.oracle_product();
        Some(parity(b.ones_iter().map(|p| {
            let (i, j) = positions[p];
            c.get(i, j)
        })))
    }

    /// Checks the construction's identity against the oracle product.
    pub fn validate(&self) -> Result<(), ReductionError> {
        let construction = self.construction();
        let fail = |detail: String| {
            Err(ReductionError::IdentityFailed {
                construction,
                detail,
            })
        };
        let c = self.instance.oracle_product();
        if c.weight() > self.instance.ell() {
            return fail(format!("product weight {} exceeds {}", c.weight(), self.instance.ell()));
        }
        match &self.payload {
            Payload::DisjFamily { a, b } => {
                for (i, (x, y)) in a.iter().zip(b).enumerate() {
                    if c.get(i, i) != x.intersects(y)? {
                        return fail(format!("diagonal entry {i} disagrees with disjointness"));
                    }
                }
            }
            Payload::InnerProduct { a, b, .. } => {
                if c != self.instance.a() {
                    return fail("A∗I differs from A".into());
                }
                if self.read_inner_product() != Some(a.dot(b)?) {
                    return fail("inner product read from the output is wrong".into());
                }
            }
            Payload::OrBlocks { blocks } => {
                let side = blocks.first().map_or(0, |(a, _)| a.rows());
                let mut expected = BitMatrix::zeros(side, side);
                for (a, b) in blocks {
                    expected.or_assign(&a.bool_product(b)?)?;
                }
                let n = c.rows();
                let mut padded = BitMatrix::zeros(n, n);
                padded.paste(0, 0, &expected)?;
                if c != &padded {
                    return fail("product is not the OR of the block products in the corner".into());
                }
            }
            Payload::IpF2 { x, y } => {
                let diagonal = parity((0..x.len()).map(|i| c.get(i, i)));
                let mut ip = false;
                for (u, v) in x.iter().zip(y) {
                    ip ^= u.dot(v)?;
                }
                if diagonal != ip {
                    return fail("diagonal parity differs from x·y".into());
                }
            }
        }
        Ok(())
    }

    /// Recovers the source inputs from the matrices alone (plus Bob's `b` for
    /// the inner-product embedding, which never enters the instance).
    pub fn decode_payload(&self) -> Payload {
        let (a, b) = (self.instance.a(), self.instance.b());
        let ell = self.instance.ell();
        match &self.payload {
            Payload::DisjFamily { a: xs, .. } => Payload::DisjFamily {
                a: (0..xs.len()).map(|i| a.row(i)).collect(),
                b: (0..xs.len()).map(|i| b.column(i)).collect(),
            },
            Payload::IpF2 { x, .. } => Payload::IpF2 {
                x: (0..x.len()).map(|i| a.row(i)).collect(),
                y: (0..x.len()).map(|i| b.column(i)).collect(),
            },
            Payload::InnerProduct { b: bob, .. } => {
                let positions = row_major_layout(ell, a.rows());
                let bits: Vec<bool> = positions.iter().map(|&(i, j)| a.get(i, j)).collect();
                Payload::InnerProduct {
                    a: BitVector::from_bools(&bits),
                    b: bob.clone(),
                    positions,
                }
            }
            Payload::OrBlocks { blocks } => {
                let side = blocks.first().map_or(0, |(x, _)| x.rows());
                Payload::OrBlocks {
                    blocks: (0..blocks.len())
                        .map(|i| (a.block(0, i * side, side, side), b.block(i * side, 0, side, side)))
                        .collect(),
                }
            }
        }
    }

    /// Number of embedded source instances (vector length for the
    /// inner-product embedding).
    fn parts(&self) -> usize {
        match &self.payload {
            Payload::DisjFamily { a, .. } => a.len(),
            Payload::InnerProduct { a, .. } => a.len(),
            Payload::OrBlocks { blocks } => blocks.len(),
            Payload::IpF2 { x, .. } => x.len(),
        }
    }

    /// Header lines, then `A` and `B` in the matrix text format:
    ///
    /// ```text
    /// embedding or-blocks
    /// ell 16
    /// parts 4
    /// side 4          (or-blocks only)
    /// bob 0110…       (inner-product only, Bob's vector)
    /// ```
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "embedding {}\nell {}\nparts {}\n",
            self.construction(),
            self.instance.ell(),
            self.parts()
        );
        match &self.payload {
            Payload::OrBlocks { blocks } => {
                s += &format!("side {}\n", blocks.first().map_or(0, |(a, _)| a.rows()));
            }
            Payload::InnerProduct { b, .. } => s += &format!("bob {b}\n"),
            _ => {}
        }
        s += &self.instance.a().to_text();
        s += &self.instance.b().to_text();
        s
    }

    /// Parses [`to_text`](Self::to_text) output and rebuilds the embedding
    /// through its constructor.
    pub fn from_text(text: &str) -> Result<Self, ReductionError> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let mut header = std::collections::HashMap::new();
        let mut at = 0;
        while let Some((key, value)) = lines.get(at).and_then(|l| l.split_once(' ')) {
            if key.parse::<usize>().is_ok() {
                break;
            }
            header.insert(key, value.trim());
            at += 1;
        }
        let field = |key: &str| {
            header
                .get(key)
                .copied()
                .ok_or_else(|| ReductionError::Parse(format!("missing header {key:?}")))
        };
        let number = |key: &str| {
            field(key)?
                .parse::<usize>()
                .map_err(|_| ReductionError::Parse(format!("header {key:?} is not a number")))
        };
        let construction: Construction = field("embedding")?.parse()?;
        let parts = number("parts")?;
        let mut matrix = || -> Result<BitMatrix, ReductionError> {
            let dims = lines
                .get(at)
                .ok_or_else(|| ReductionError::Parse("missing matrix".into()))?;
            let rows: usize = dims
                .split_whitespace()
                .next()
                .and_then(|r| r.parse().ok())
                .ok_or_else(|| ReductionError::Parse(format!("bad matrix header {dims:?}")))?;
            let end = at + 1 + rows;
            let block = lines
                .get(at..end)
                .ok_or_else(|| ReductionError::Parse("truncated matrix".into()))?;
            at = end;
            Ok(BitMatrix::from_text(&block.join("\n"))?)
        };
        let a = matrix()?;
        let b = matrix()?;
        let n = a.rows();
        let embedding = match construction {
            Construction::DisjFamily | Construction::IpF2 => {
                let xs: Vec<_> = (0..parts.min(n)).map(|i| a.row(i)).collect();
                let ys: Vec<_> = (0..parts.min(n)).map(|i| b.column(i)).collect();
                if construction == Construction::DisjFamily {
                    embed_disj_family(&xs, &ys, n)?
                } else {
                    embed_ip_f2(&xs, &ys, n)?
                }
            }
            Construction::InnerProduct => {
                let bob = BitVector::parse01(field("bob")?)?;
                if parts > n * n {
                    return Err(ReductionError::LayoutOverflow { len: parts, n });
                }
                let bits: Vec<bool> = row_major_layout(parts, n).iter().map(|&(i, j)| a.get(i, j)).collect();
                embed_inner_product(&BitVector::from_bools(&bits), &bob, n)?
            }
            Construction::OrBlocks => {
                let side = number("side")?;
                if parts * side > n {
                    return Err(ReductionError::DimensionOverflow { k: parts, side, n });
                }
                let blocks: Vec<_> = (0..parts)
                    .map(|i| (a.block(0, i * side, side, side), b.block(i * side, 0, side, side)))
                    .collect();
                embed_or_blocks(&blocks, n)?
            }
        };
        if embedding.instance.a() != &a || embedding.instance.b() != &b {
            return Err(ReductionError::Parse(
                "matrices carry entries outside the construction's layout".into(),
            ));
        }
        Ok(embedding)
    }
}
