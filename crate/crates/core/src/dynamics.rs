//! Time evolution generated by `H0`, `H` or `H†`, in the Schrödinger and
//! Heisenberg pictures.
//!
//! Every propagator is read off the spectral resolution stored in the
//! [`BiorthogonalSystem`]:
//!
//! | generator | eigenvalues | right vectors | left vectors |
//! |-----------|-------------|---------------|--------------|
//! | `H`       | `E_k`       | `φ_k`         | `Ψ_k`        |
//! | `H†`      | `conj E_k`  | `Ψ_k`         | `φ_k`        |
//! | `H0`      | `E_k`       | `e_k`         | `e_k`        |
//!
//! so `e^{-iGt} = Σ_k e^{-iλ_k t} |r_k><l_k|` and a time grid costs one
//! phase per eigenvalue per point.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::biortho::BiorthogonalSystem;
use crate::error::{Error, Result};
use crate::linalg::{check_dims, expm_series, ComplexMatrix, ComplexVector};
use crate::metric::{self, MetricKind};
use crate::scalar::{cr, czero, minus_i, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    H0,
    H,
    Hdagger,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 3] = [GeneratorKind::H0, GeneratorKind::H, GeneratorKind::Hdagger];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::H0 => "h0",
            GeneratorKind::H => "h",
            GeneratorKind::Hdagger => "hdagger",
        }
    }

    /// Geometry in which this generator's evolution is norm-preserving
    /// (for real spectra).
    pub fn conserved_metric(self) -> MetricKind {
        match self {
            GeneratorKind::H0 => MetricKind::Standard,
            GeneratorKind::H => MetricKind::Psi,
            GeneratorKind::Hdagger => MetricKind::Phi,
        }
    }

    pub fn matrix<T: Real>(self, sys: &BiorthogonalSystem<T>) -> &ComplexMatrix<T> {
        match self {
            GeneratorKind::H0 => sys.h0(),
            GeneratorKind::H => sys.h(),
            GeneratorKind::Hdagger => sys.h_dagger(),
        }
    }
}

/// `(λ_k, r_k, l_k)` with `G = Σ λ_k |r_k><l_k|`.
pub struct SpectralResolution<'a, T> {
    pub eigenvalues: Vec<Complex<T>>,
    pub right: &'a [ComplexVector<T>],
    pub left: &'a [ComplexVector<T>],
}

pub fn spectral_resolution<T: Real>(
    sys: &BiorthogonalSystem<T>,
    gen: GeneratorKind,
) -> SpectralResolution<'_, T> {
    match gen {
        GeneratorKind::H => SpectralResolution {
            eigenvalues: sys.eigenvalues().to_vec(),
            right: sys.phi(),
            left: sys.psi(),
        },
        GeneratorKind::Hdagger => SpectralResolution {
            eigenvalues: sys.eigenvalues().iter().map(|z| z.conj()).collect(),
            right: sys.psi(),
            left: sys.phi(),
        },
        GeneratorKind::H0 => SpectralResolution {
            eigenvalues: sys.eigenvalues().to_vec(),
            right: sys.e(),
            left: sys.e(),
        },
    }
}

impl<T: Real> SpectralResolution<'_, T> {
    /// `Σ_k f(λ_k) |r_k><l_k|`.
    pub fn apply_function(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> ComplexMatrix<T> {
        let n = self.right.len();
        let mut out = ComplexMatrix::zeros(n);
        for ((lambda, r), l) in self.eigenvalues.iter().zip(self.right).zip(self.left) {
            let w = f(*lambda);
            for i in 0..n {
                let ri = r[i] * w;
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + ri * l[j].conj();
                }
            }
        }
        out
    }
}

/// `e^{-iGt}` for real or complex `t`.
pub fn propagator<T: Real>(
    sys: &BiorthogonalSystem<T>,
    gen: GeneratorKind,
    t: Complex<T>,
) -> ComplexMatrix<T> {
    spectral_resolution(sys, gen).apply_function(|lambda| (minus_i::<T>() * lambda * t).exp())
}

pub fn propagator_at<T: Real>(
    sys: &BiorthogonalSystem<T>,
    gen: GeneratorKind,
    t: T,
) -> ComplexMatrix<T> {
    propagator(sys, gen, cr(t))
}

/// `e^{-iGt}` through the series exponential, independent of any eigendata.
pub fn propagator_series<T: Real>(
    sys: &BiorthogonalSystem<T>,
    gen: GeneratorKind,
    t: Complex<T>,
) -> Result<ComplexMatrix<T>> {
    expm_series(&gen.matrix(sys).scale(minus_i::<T>() * t))
}

/// Frobenius distance between the spectral and series propagators.
pub fn propagator_deviation<T: Real>(
    sys: &BiorthogonalSystem<T>,
    gen: GeneratorKind,
    t: T,
) -> Result<T> {
    let series = propagator_series(sys, gen, cr(t))?;
    Ok(propagator_at(sys, gen, t).distance(&series))
}

/// Strictly increasing, finite, non-empty sequence of times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T>(Vec<T>);

impl<T: Real> TimeGrid<T> {
    pub fn new(times: Vec<T>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidGrid("grid is empty".into()));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("grid contains non-finite times".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("times must be strictly increasing".into()));
        }
        Ok(Self(times))
    }

    /// `steps + 1` equally spaced samples with both endpoints included.
    pub fn linspace(start: T, stop: T, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Self::new(vec![start]);
        }
        let n = T::from_usize(steps).unwrap();
        let times = (0..=steps)
            .map(|i| {
                if i == steps {
                    stop
                } else {
                    start + (stop - start) * T::from_usize(i).unwrap() / n
                }
            })
            .collect();
        Self::new(times)
    }

    pub fn times(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Phi,
    Psi,
    E,
}

/// Coefficients of a vector in one of the three eigenbases.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralExpansion<T> {
    pub coefficients: Vec<Complex<T>>,
    pub basis_kind: BasisKind,
}

impl<T: Real> SpectralExpansion<T> {
    /// `c_k = <Ψ_k, v>` on `φ`, `<φ_k, v>` on `Ψ`, `<e_k, v>` on `e`.
    pub fn expand(
        sys: &BiorthogonalSystem<T>,
        basis_kind: BasisKind,
        v: &ComplexVector<T>,
    ) -> Result<Self> {
        check_dims(sys.dim(), v.dim())?;
        let duals = match basis_kind {
            BasisKind::Phi => sys.psi(),
            BasisKind::Psi => sys.phi(),
            BasisKind::E => sys.e(),
        };
        Ok(Self {
            coefficients: duals.iter().map(|d| d.dot(v)).collect(),
            basis_kind,
        })
    }

    pub fn reconstruct(&self, sys: &BiorthogonalSystem<T>) -> ComplexVector<T> {
        let basis = match self.basis_kind {
            BasisKind::Phi => sys.phi(),
            BasisKind::Psi => sys.psi(),
            BasisKind::E => sys.e(),
        };
        let mut out = ComplexVector::zeros(sys.dim());
        for (c, b) in self.coefficients.iter().zip(basis) {
            out += &b.scale(*c);
        }
        out
    }
}

/// States and their norms in all three geometries along a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace<T> {
    pub generator: GeneratorKind,
    pub times: Vec<T>,
    pub states: Vec<ComplexVector<T>>,
    /// Indexed like [`MetricKind::ALL`].
    pub norms: [Vec<T>; 3],
}

impl<T: Real> EvolutionTrace<T> {
    pub fn norms(&self, kind: MetricKind) -> &[T] {
        let idx = MetricKind::ALL.iter().position(|k| *k == kind).unwrap();
        &self.norms[idx]
    }

    /// `max - min` of the norm series in the given geometry.
    pub fn norm_variation(&self, kind: MetricKind) -> T {
        let s = self.norms(kind);
        let max = s.iter().copied().fold(T::neg_infinity(), T::max);
        let min = s.iter().copied().fold(T::infinity(), T::min);
        max - min
    }
}

/// States `e^{-iGt} Φ0` evaluated by phase reweighting of the initial
/// spectral coefficients.
pub fn evolve_state<T: Real>(
    sys: &BiorthogonalSystem<T>,
    gen: GeneratorKind,
    initial: &ComplexVector<T>,
    grid: &TimeGrid<T>,
) -> Result<EvolutionTrace<T>> {
    check_dims(sys.dim(), initial.dim())?;
    let states = evolve_states(sys, gen, initial, grid.times());
    let mut norms: [Vec<T>; 3] = Default::default();
    for (slot, kind) in norms.iter_mut().zip(MetricKind::ALL) {
        *slot = states
            .iter()
            .map(|s| metric::norm(sys, kind, s))
            .collect::<Result<_>>()?;
    }
    Ok(EvolutionTrace {
        generator: gen,
        times: grid.times().to_vec(),
        states,
        norms,
    })
}

pub(crate) fn evolve_states<T: Real>(
    sys: &BiorthogonalSystem<T>,
    gen: GeneratorKind,
    initial: &ComplexVector<T>,
    times: &[T],
) -> Vec<ComplexVector<T>> {
    let res = spectral_resolution(sys, gen);
    let coeffs: Vec<Complex<T>> = res.left.iter().map(|l| l.dot(initial)).collect();
    let n = sys.dim();
    times
        .iter()
        .map(|&t| {
            let mut out = vec![czero::<T>(); n];
            for ((lambda, c), r) in res.eigenvalues.iter().zip(&coeffs).zip(res.right) {
                let w = *c * (minus_i::<T>() * lambda * cr(t)).exp();
                for (o, x) in out.iter_mut().zip(r.iter()) {
                    *o = *o + w * x;
                }
            }
            ComplexVector::from_vec(out)
        })
        .collect()
}

/// Heisenberg-picture conventions for `X(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    /// `e^{iH†t} X e^{-iHt}`: standard geometry with `H` evolution.
    Mixed,
    /// `e^{iHt} X e^{-iHt}`
    Psi,
    /// `e^{iH†t} X e^{-iH†t}`
    Phi,
    /// `e^{iH0 t} X e^{-iH0 t}`
    Partner,
}

impl Picture {
    pub fn name(self) -> &'static str {
        match self {
            Picture::Mixed => "mixed",
            Picture::Psi => "psi",
            Picture::Phi => "phi",
            Picture::Partner => "partner",
        }
    }

    /// `(generator of the left factor, generator of the right factor)`.
    fn generators(self) -> (GeneratorKind, GeneratorKind) {
        match self {
            Picture::Mixed => (GeneratorKind::Hdagger, GeneratorKind::H),
            Picture::Psi => (GeneratorKind::H, GeneratorKind::H),
            Picture::Phi => (GeneratorKind::Hdagger, GeneratorKind::Hdagger),
            Picture::Partner => (GeneratorKind::H0, GeneratorKind::H0),
        }
    }
}

pub fn heisenberg<T: Real>(
    sys: &BiorthogonalSystem<T>,
    picture: Picture,
    x: &ComplexMatrix<T>,
    t: T,
) -> Result<ComplexMatrix<T>> {
    heisenberg_complex(sys, picture, x, cr(t))
}

/// Heisenberg map at complex time, `e^{iG₁z} X e^{-iG₂z}`.
pub fn heisenberg_complex<T: Real>(
    sys: &BiorthogonalSystem<T>,
    picture: Picture,
    x: &ComplexMatrix<T>,
    z: Complex<T>,
) -> Result<ComplexMatrix<T>> {
    check_dims(sys.dim(), x.dim())?;
    let (left, right) = picture.generators();
    let l = propagator(sys, left, -z);
    let r = propagator(sys, right, z);
    Ok(&(&l * x) * &r)
}

/// `‖(XY)(t) - X(t) Y(t)‖`.
pub fn automorphism_defect<T: Real>(
    sys: &BiorthogonalSystem<T>,
    picture: Picture,
    x: &ComplexMatrix<T>,
    y: &ComplexMatrix<T>,
    t: T,
) -> Result<T> {
    check_dims(sys.dim(), y.dim())?;
    let xy = heisenberg(sys, picture, &(x * y), t)?;
    let xt = heisenberg(sys, picture, x, t)?;
    let yt = heisenberg(sys, picture, y, t)?;
    Ok(xy.distance(&(&xt * &yt)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biortho::NormalizationPolicy;
    use crate::scalar::c;
    use crate::Tolerances;

    fn sds(k: f64) -> BiorthogonalSystem<f64> {
        let h = ComplexMatrix::from_real_rows(&[vec![0.0, -(1.0 - k)], vec![-(1.0 + k), 0.0]])
            .unwrap();
        BiorthogonalSystem::build(&h, NormalizationPolicy::Sds, &Tolerances::default()).unwrap()
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let sys = sds(0.5);
        for gen in GeneratorKind::ALL {
            assert!(propagator_at(&sys, gen, 0.0).distance(&ComplexMatrix::identity(2)) < 1e-12);
        }
    }

    #[test]
    fn eigenstates_only_pick_up_a_phase() {
        let sys = sds(0.5);
        let t = 0.83;
        let u = propagator_at(&sys, GeneratorKind::H, t);
        for (e, f) in sys.eigenvalues().iter().zip(sys.phi()) {
            let want = f.scale((c(0.0, -1.0) * e * t).exp());
            assert!(u.matvec(f).distance(&want) < 1e-12);
        }
    }

    #[test]
    fn standard_norm_oscillates_for_eigenvector_sum() {
        // ‖φ0 + φ1‖²(t) = 2(2 - cos 2ρt), ρ = -√0.75
        let sys = sds(0.5);
        let rho = -(0.75f64).sqrt();
        let phi0 = &sys.phi()[0] + &sys.phi()[1];
        let grid = TimeGrid::linspace(0.0, 7.0, 200).unwrap();
        let trace = evolve_state(&sys, GeneratorKind::H, &phi0, &grid).unwrap();
        for (t, n) in trace.times.iter().zip(trace.norms(MetricKind::Standard)) {
            let want = 2.0 * (2.0 - (2.0 * rho * t).cos());
            assert!((n * n - want).abs() < 1e-11, "t={t}");
        }
        for n in trace.norms(MetricKind::Psi) {
            assert!((n - 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn expansion_round_trip_in_each_basis() {
        let sys = sds(-0.3);
        let v = ComplexVector::from_vec(vec![c(0.3, -1.0), c(2.0, 0.5)]);
        for basis in [BasisKind::Phi, BasisKind::Psi, BasisKind::E] {
            let ex = SpectralExpansion::expand(&sys, basis, &v).unwrap();
            assert!(ex.reconstruct(&sys).distance(&v) < 1e-12);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::<f64>::new(vec![]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.0]).is_err());
        assert!(TimeGrid::new(vec![1.0, 0.5]).is_err());
        assert!(TimeGrid::new(vec![0.0, f64::NAN]).is_err());
        let g = TimeGrid::linspace(0.0, 1.0, 4).unwrap();
        assert_eq!(g.times(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(TimeGrid::linspace(2.0, 3.0, 0).unwrap().times(), &[2.0]);
    }

    #[test]
    fn identity_in_mixed_picture_is_not_conserved() {
        let sys = sds(0.5);
        let id = ComplexMatrix::identity(2);
        assert!(heisenberg(&sys, Picture::Psi, &id, 1.3).unwrap().distance(&id) < 1e-12);
        assert!(heisenberg(&sys, Picture::Mixed, &id, 1.0).unwrap().distance(&id) > 1e-2);
    }

    #[test]
    fn automorphism_defect_vanishes_at_time_zero() {
        let sys = sds(0.5);
        let x = sys.h().clone();
        let y = sys.s_phi().clone();
        for p in [Picture::Mixed, Picture::Psi, Picture::Phi, Picture::Partner] {
            assert!(automorphism_defect(&sys, p, &x, &y, 0.0).unwrap() < 1e-12);
        }
    }
}
