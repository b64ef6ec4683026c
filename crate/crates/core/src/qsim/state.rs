use num_complex::Complex64;
use rand::Rng;

use super::{QsimError, EXACT_DOMAIN_CAP};
use crate::f2core::BitVector;

/// Amplitude vector of the shuttled search register over `[n]`.
///
/// The register starts in `|π(S)⟩`, the uniform superposition over a support
/// `S ⊆ [n]`. Both reflections preserve the span of `S`, so amplitudes off
/// the support stay exactly zero; only the support entries are stored.
#[derive(Debug, Clone)]
pub struct SearchState {
    n: usize,
    support: Vec<usize>,
    amplitudes: Vec<Complex64>,
}

impl SearchState {
    /// `|π(S)⟩ = Σ_{i∈S} |S|^{-1/2} |i⟩`. The support must not repeat indices.
    pub fn uniform_over(n: usize, support: &[usize]) -> Result<Self, QsimError> {
        if n > EXACT_DOMAIN_CAP {
            return Err(QsimError::SimulationCap {
                n,
                cap: EXACT_DOMAIN_CAP,
            });
        }
        if support.is_empty() {
            return Err(QsimError::EmptySupport);
        }
        if let Some(&index) = support.iter().find(|&&i| i >= n) {
            return Err(QsimError::SupportOutOfRange { index, n });
        }
        let a = Complex64::new(1.0 / (support.len() as f64).sqrt(), 0.0);
        Ok(Self {
            n,
            support: support.to_vec(),
            amplitudes: vec![a; support.len()],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Amplitude of `|i⟩`; zero off the support.
    pub fn amplitude(&self, i: usize) -> Complex64 {
        self.support
            .iter()
            .position(|&s| s == i)
            .map_or(Complex64::new(0.0, 0.0), |p| self.amplitudes[p])
    }

    /// Restarts from `|π(S)⟩` without reallocating.
    pub fn reset(&mut self) {
        let a = Complex64::new(1.0 / (self.support.len() as f64).sqrt(), 0.0);
        self.amplitudes.fill(a);
    }

    /// The remote phase oracle `Σ_i (-1)^{marked_i} |i⟩⟨i|`.
    pub fn reflect_marked(&mut self, marked: &BitVector) {
        for (amp, &i) in self.amplitudes.iter_mut().zip(&self.support) {
            if marked.get(i) {
                *amp = -*amp;
            }
        }
    }

    /// The local reflection `2|π(S)⟩⟨π(S)| − I`.
    pub fn reflect_about_start(&mut self) {
        let mean: Complex64 =
            self.amplitudes.iter().sum::<Complex64>() / self.amplitudes.len() as f64;
        let twice = mean * 2.0;
        for amp in &mut self.amplitudes {
            *amp = twice - *amp;
        }
    }

    /// One Grover iteration: the remote oracle, then the local reflection.
    pub fn iterate(&mut self, marked: &BitVector) {
        self.reflect_marked(marked);
        self.reflect_about_start();
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// Probability that a measurement lands on a marked index.
    pub fn marked_probability(&self, marked: &BitVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&self.support)
            .filter(|(_, &i)| marked.get(i))
            .map(|(a, _)| a.norm_sqr())
            .sum()
    }

    /// Samples a computational-basis outcome.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>() * self.norm_sqr();
        let mut acc = 0.0;
        for (a, &i) in self.amplitudes.iter().zip(&self.support) {
            acc += a.norm_sqr();
            if u < acc {
                return i;
            }
        }
        *self.support.last().expect("support is nonempty")
    }
}
