//! Gibbs-like states `ω(X) = tr(e^{-βG} X) / tr(e^{-βG})` and the KMS check.

use num_complex::Complex;

use crate::biortho::BiorthogonalSystem;
use crate::dynamics::{heisenberg_complex, spectral_resolution, GeneratorKind, Picture};
use crate::error::{Error, Result};
use crate::linalg::{check_dims, ComplexMatrix};
use crate::scalar::{c, cr, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalState<T> {
    pub kind: GeneratorKind,
    pub beta: T,
    /// `e^{-βG}`
    pub weight: ComplexMatrix<T>,
    /// `Σ_k e^{-βλ_k}`
    pub z: Complex<T>,
}

pub fn build_thermal<T: Real>(
    sys: &BiorthogonalSystem<T>,
    kind: GeneratorKind,
    beta: T,
) -> Result<ThermalState<T>> {
    if !(beta > T::zero() && beta.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "beta",
            value: beta.to_f64_lossy(),
            reason: "inverse temperature must be positive and finite",
        });
    }
    let res = spectral_resolution(sys, kind);
    let boltzmann = |lambda: Complex<T>| (-lambda * beta).exp();
    let z: Complex<T> = res.eigenvalues.iter().map(|l| boltzmann(*l)).sum();
    let weight = res.apply_function(boltzmann);
    if !(z.re.is_finite() && z.im.is_finite()) || !weight.is_finite() {
        return Err(Error::Overflow {
            norm: (beta * sys.h().norm_fro()).to_f64_lossy(),
        });
    }
    if z.norm() == T::zero() {
        return Err(Error::Singular { pivot: 0 });
    }
    Ok(ThermalState {
        kind,
        beta,
        weight,
        z,
    })
}

impl<T: Real> ThermalState<T> {
    pub fn expectation(&self, x: &ComplexMatrix<T>) -> Result<Complex<T>> {
        expectation(self, x)
    }
}

/// `tr(e^{-βG} X) / Z`
pub fn expectation<T: Real>(state: &ThermalState<T>, x: &ComplexMatrix<T>) -> Result<Complex<T>> {
    check_dims(state.weight.dim(), x.dim())?;
    Ok(trace_of_product(&state.weight, x) / state.z)
}

fn trace_of_product<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Complex<T> {
    let n = a.dim();
    let mut acc = cr(T::zero());
    for i in 0..n {
        for j in 0..n {
            acc = acc + a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// The Heisenberg picture whose dynamics leaves the state built from `kind`
/// invariant.
pub fn matched_picture(kind: GeneratorKind) -> Picture {
    match kind {
        GeneratorKind::H0 => Picture::Partner,
        GeneratorKind::H => Picture::Psi,
        GeneratorKind::Hdagger => Picture::Phi,
    }
}

/// `kms_tol · max(1, cond(S_φ) / 1e4)`.
pub fn kms_tolerance<T: Real>(sys: &BiorthogonalSystem<T>) -> T {
    let scale = (sys.condition() / T::lit(1e4)).max(T::one());
    T::lit(sys.tolerances().kms_tol) * scale
}

/// `|ω(A(t) B) - ω(B A(t + iβ))|` for the state built from `kind`, with
/// `A(z)` in the matching picture.
pub fn kms_residual<T: Real>(
    sys: &BiorthogonalSystem<T>,
    kind: GeneratorKind,
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    t: T,
    beta: T,
) -> Result<T> {
    kms_residual_with(sys, kind, matched_picture(kind), a, b, t, beta)
}

/// KMS residual for an arbitrary (state, picture) combination; mismatched
/// combinations need not satisfy the identity.
pub fn kms_residual_with<T: Real>(
    sys: &BiorthogonalSystem<T>,
    kind: GeneratorKind,
    picture: Picture,
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    t: T,
    beta: T,
) -> Result<T> {
    check_dims(sys.dim(), a.dim())?;
    check_dims(sys.dim(), b.dim())?;
    let state = build_thermal(sys, kind, beta)?;
    let at = heisenberg_complex(sys, picture, a, cr(t))?;
    let at_shifted = heisenberg_complex(sys, picture, a, c(t, beta))?;
    let lhs = expectation(&state, &(&at * b))?;
    let rhs = expectation(&state, &(b * &at_shifted))?;
    Ok((lhs - rhs).norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmsEntry<T> {
    pub state: GeneratorKind,
    pub picture: Picture,
    pub residual: T,
    /// `Some(pass)` for matched pairs; mismatched pairs are report-only.
    pub verdict: Option<bool>,
}

/// The three matched pairs plus the mixed combinations: the `H0` state under
/// `H` evolution, and every state under the mixed picture.
pub fn kms_table<T: Real>(
    sys: &BiorthogonalSystem<T>,
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    t: T,
    beta: T,
) -> Result<Vec<KmsEntry<T>>> {
    let tol = kms_tolerance(sys);
    let mut out = Vec::new();
    for kind in GeneratorKind::ALL {
        let residual = kms_residual(sys, kind, a, b, t, beta)?;
        out.push(KmsEntry {
            state: kind,
            picture: matched_picture(kind),
            residual,
            verdict: Some(residual <= tol),
        });
    }
    let mut mixed = vec![(GeneratorKind::H0, Picture::Psi)];
    mixed.extend(GeneratorKind::ALL.map(|k| (k, Picture::Mixed)));
    for (kind, picture) in mixed {
        out.push(KmsEntry {
            state: kind,
            picture,
            residual: kms_residual_with(sys, kind, picture, a, b, t, beta)?,
            verdict: None,
        });
    }
    Ok(out)
}
