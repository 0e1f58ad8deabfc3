//! Seeded random matrices and vectors for audits and property tests.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{inverse, ComplexMatrix, ComplexVector};
use crate::scalar::{c, cr, Real};

/// Deterministic generator: the same seed always yields the same sequence,
/// independent of platform.
#[derive(Debug, Clone)]
pub struct Ensemble {
    rng: ChaCha8Rng,
}

impl Ensemble {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn normal<T: Real>(&mut self) -> T {
        let x: f64 = self.rng.sample(StandardNormal);
        T::lit(x)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform<T: Real>(&mut self, lo: f64, hi: f64) -> T {
        T::lit(self.rng.random_range(lo..hi))
    }

    pub fn complex<T: Real>(&mut self) -> Complex<T> {
        let s = T::FRAC_1_SQRT_2();
        c(self.normal::<T>() * s, self.normal::<T>() * s)
    }

    pub fn vector<T: Real>(&mut self, n: usize) -> ComplexVector<T> {
        ComplexVector::from_vec((0..n).map(|_| self.complex()).collect())
    }

    pub fn unit_vector<T: Real>(&mut self, n: usize) -> ComplexVector<T> {
        loop {
            let v = self.vector::<T>(n);
            if v.norm() > T::lit(1e-3) {
                return v.normalized();
            }
        }
    }

    /// Gaussian entries with variance 1/n, so the norm stays O(1).
    pub fn matrix<T: Real>(&mut self, n: usize) -> ComplexMatrix<T> {
        let s = T::one() / T::from_usize(n).unwrap().sqrt();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.complex::<T>() * s;
            }
        }
        m
    }

    /// Random matrix scaled to unit Frobenius (hence operator) norm.
    pub fn unit_matrix<T: Real>(&mut self, n: usize) -> ComplexMatrix<T> {
        let m = self.matrix::<T>(n);
        let norm = m.norm_fro();
        m.scale_real(T::one() / norm)
    }

    pub fn hermitian<T: Real>(&mut self, n: usize) -> ComplexMatrix<T> {
        let m = self.matrix::<T>(n);
        (&m + &m.dagger()).scale_real(T::lit(0.5))
    }

    /// `M M† + floor·I`.
    pub fn positive_definite<T: Real>(&mut self, n: usize, floor: f64) -> ComplexMatrix<T> {
        let m = self.matrix::<T>(n);
        &(&m * &m.dagger()) + &ComplexMatrix::identity(n).scale_real(T::lit(floor))
    }

    /// `I + spread·G` with Gaussian `G`; small spreads keep the condition
    /// number moderate.
    pub fn similarity<T: Real>(&mut self, n: usize, spread: f64) -> ComplexMatrix<T> {
        let g = self.matrix::<T>(n);
        &ComplexMatrix::identity(n) + &g.scale_real(T::lit(spread))
    }

    /// `n` real values, ascending, consecutive gaps in `[min_gap, min_gap + 1)`,
    /// centred near zero.
    pub fn real_spectrum<T: Real>(&mut self, n: usize, min_gap: f64) -> Vec<T> {
        let mut values = Vec::with_capacity(n);
        let mut x: T = self.uniform::<T>(-1.0, 0.0) * T::from_usize(n).unwrap() * T::lit(0.5);
        for _ in 0..n {
            values.push(x);
            x = x + T::lit(min_gap) + self.uniform::<T>(0.0, 1.0);
        }
        values
    }

    /// Non-normal `V diag(λ) V⁻¹` with the given eigenvalues and
    /// `V = I + spread·G`.
    pub fn with_spectrum<T: Real>(
        &mut self,
        eigenvalues: &[Complex<T>],
        spread: f64,
    ) -> Result<ComplexMatrix<T>> {
        let n = eigenvalues.len();
        let v = self.similarity::<T>(n, spread);
        let v_inv = inverse(&v)?;
        Ok(&(&v * &ComplexMatrix::from_diagonal(eigenvalues)) * &v_inv)
    }

    /// Non-normal matrix with a real, well separated spectrum.
    pub fn real_spectrum_matrix<T: Real>(
        &mut self,
        n: usize,
        min_gap: f64,
        spread: f64,
    ) -> Result<ComplexMatrix<T>> {
        let values: Vec<Complex<T>> = self
            .real_spectrum::<T>(n, min_gap)
            .into_iter()
            .map(cr)
            .collect();
        self.with_spectrum(&values, spread)
    }
}
