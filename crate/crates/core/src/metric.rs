//! The three inner-product geometries and their adjoints.
//!
//! `<f, g>_phi = <S_phi f, g>` and `<f, g>_psi = <S_psi f, g>`. The adjoint of
//! `X` is `X†` in the standard geometry, `X♭ = S_psi X† S_phi` in the phi
//! geometry and `X♯ = S_phi X† S_psi` in the psi geometry.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::biortho::BiorthogonalSystem;
use crate::error::{Error, Result};
use crate::linalg::{check_dims, ComplexMatrix, ComplexVector};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Standard,
    Phi,
    Psi,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::Standard, MetricKind::Phi, MetricKind::Psi];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Standard => "standard",
            MetricKind::Phi => "phi",
            MetricKind::Psi => "psi",
        }
    }

    /// The metric operator `S` with `<f, g>_kind = <S f, g>`; `None` for the identity.
    pub fn operator<T: Real>(self, sys: &BiorthogonalSystem<T>) -> Option<&ComplexMatrix<T>> {
        match self {
            MetricKind::Standard => None,
            MetricKind::Phi => Some(sys.s_phi()),
            MetricKind::Psi => Some(sys.s_psi()),
        }
    }

    fn half_operator<T: Real>(self, sys: &BiorthogonalSystem<T>) -> Option<&ComplexMatrix<T>> {
        match self {
            MetricKind::Standard => None,
            MetricKind::Phi => Some(sys.s_phi_half()),
            MetricKind::Psi => Some(sys.s_psi_half()),
        }
    }
}

pub fn inner<T: Real>(
    sys: &BiorthogonalSystem<T>,
    kind: MetricKind,
    f: &ComplexVector<T>,
    g: &ComplexVector<T>,
) -> Result<Complex<T>> {
    check_dims(sys.dim(), f.dim())?;
    check_dims(sys.dim(), g.dim())?;
    Ok(match kind.operator(sys) {
        None => f.dot(g),
        Some(s) => s.matvec(f).dot(g),
    })
}

/// `<S^{1/2} f, S^{1/2} g>`, the square-root form of the same inner product.
pub fn inner_half_form<T: Real>(
    sys: &BiorthogonalSystem<T>,
    kind: MetricKind,
    f: &ComplexVector<T>,
    g: &ComplexVector<T>,
) -> Result<Complex<T>> {
    check_dims(sys.dim(), f.dim())?;
    check_dims(sys.dim(), g.dim())?;
    Ok(match kind.half_operator(sys) {
        None => f.dot(g),
        Some(r) => r.matvec(f).dot(&r.matvec(g)),
    })
}

pub fn norm_sqr<T: Real>(
    sys: &BiorthogonalSystem<T>,
    kind: MetricKind,
    f: &ComplexVector<T>,
) -> Result<T> {
    let z = inner(sys, kind, f, f)?;
    // A positive metric yields a real non-negative value up to rounding.
    let scale = f.norm_sqr() * kind.operator(sys).map_or(T::one(), |s| s.norm_fro());
    let slack = T::lit(1e-12) * scale.max(T::min_positive_value());
    if z.re < -slack || z.im.abs() > slack.max(T::lit(1e-12) * z.re.abs()) {
        return Err(Error::NegativeNorm {
            value: z.re.to_f64_lossy(),
        });
    }
    Ok(z.re.max(T::zero()))
}

pub fn norm<T: Real>(
    sys: &BiorthogonalSystem<T>,
    kind: MetricKind,
    f: &ComplexVector<T>,
) -> Result<T> {
    Ok(norm_sqr(sys, kind, f)?.sqrt())
}

pub fn adjoint<T: Real>(
    sys: &BiorthogonalSystem<T>,
    kind: MetricKind,
    x: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    check_dims(sys.dim(), x.dim())?;
    let xd = x.dagger();
    Ok(match kind {
        MetricKind::Standard => xd,
        MetricKind::Phi => &(sys.s_psi() * &xd) * sys.s_phi(),
        MetricKind::Psi => &(sys.s_phi() * &xd) * sys.s_psi(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfAdjointness<T> {
    pub is_selfadjoint: bool,
    /// `‖X - adjoint(X)‖`
    pub residual: T,
}

/// Self-adjointness in the given geometry, judged at `sa_tol · (1 + ‖X‖)`.
pub fn is_selfadjoint<T: Real>(
    sys: &BiorthogonalSystem<T>,
    kind: MetricKind,
    x: &ComplexMatrix<T>,
) -> Result<SelfAdjointness<T>> {
    let adj = adjoint(sys, kind, x)?;
    let residual = x.distance(&adj);
    let bound = T::lit(sys.tolerances().sa_tol) * (T::one() + x.norm_fro());
    Ok(SelfAdjointness {
        is_selfadjoint: residual <= bound,
        residual,
    })
}
