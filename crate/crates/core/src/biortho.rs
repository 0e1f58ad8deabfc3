//! Biorthogonal eigenbases of a non-self-adjoint matrix and the structure
//! built on them: metric operators `S_phi = Σ|φ_k><φ_k|`, `S_psi = Σ|Ψ_k><Ψ_k|`,
//! their positive square roots, the similar operator `H0 = S_psi^{1/2} H S_phi^{1/2}`
//! and its eigenbasis `e_k = S_psi^{1/2} φ_k`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{
    condition_number, eigen_general, sqrt_psd, ComplexMatrix, ComplexVector, EigenDecomposition,
};
use crate::scalar::{cr, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumKind {
    AllReal,
    SomeComplex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumClass<T> {
    pub kind: SpectrumKind,
    /// Largest `|Im E_k|`.
    pub max_imag: T,
}

impl<T: Real> SpectrumClass<T> {
    pub fn is_real(&self) -> bool {
        self.kind == SpectrumKind::AllReal
    }
}

/// `AllReal` iff every `|Im E_k| <= real_tol`.
pub fn classify_spectrum<T: Real>(eigenvalues: &[Complex<T>], real_tol: f64) -> SpectrumClass<T> {
    let max_imag = eigenvalues
        .iter()
        .map(|z| z.im.abs())
        .fold(T::zero(), T::max);
    let kind = if max_imag <= T::lit(real_tol) {
        SpectrumKind::AllReal
    } else {
        SpectrumKind::SomeComplex
    };
    SpectrumClass { kind, max_imag }
}

/// How the free scale of each pair `(φ_k, Ψ_k)` is fixed. Only the product
/// is constrained, by `<φ_k, Ψ_k> = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationPolicy {
    /// `‖φ_k‖ = 1`, largest-magnitude component of `φ_k` real positive.
    #[default]
    UnitPhi,
    /// First component of `φ_k` equal to `1/√2`; with the two-level
    /// pseudo-fermion model this gives `N_phi = N_psi = 1/√2`.
    Sds,
}

impl NormalizationPolicy {
    pub fn name(self) -> &'static str {
        match self {
            NormalizationPolicy::UnitPhi => "unit_phi",
            NormalizationPolicy::Sds => "sds",
        }
    }

    pub(crate) fn apply<T: Real>(self, v: &ComplexVector<T>) -> Result<ComplexVector<T>> {
        match self {
            NormalizationPolicy::UnitPhi => {
                let u = v.normalized();
                let z = u[u.argmax_abs()];
                Ok(u.scale(z.conj() / cr(z.norm())))
            }
            NormalizationPolicy::Sds => {
                let first = v[0];
                if first.norm() <= T::lit(1e-8) * v.norm() {
                    return Err(Error::ParameterOutOfRange {
                        name: "normalization",
                        value: first.norm().to_f64_lossy(),
                        reason: "policy `sds` needs a nonzero first component",
                    });
                }
                Ok(v.scale(cr(T::FRAC_1_SQRT_2()) / first))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quality {
    Good,
    /// `cond(S_phi)` exceeded the configured limit.
    IllConditioned,
}

/// Matches eigenvectors of `H†` to the given right eigenpairs of `H` by
/// `eigenvalue(H†, Ψ_k) = conj(E_k)` and rescales them to `<φ_k, Ψ_k> = 1`.
///
/// The result is aligned index-by-index with `phi`, whatever order `phi`
/// comes in.
pub fn pair_adjoint_eigensystem<T: Real>(
    h: &ComplexMatrix<T>,
    phi: &EigenDecomposition<T>,
    tol: &Tolerances,
) -> Result<EigenDecomposition<T>> {
    let adjoint = eigen_general(&h.dagger(), tol)?;
    let window = T::lit(tol.match_tol) * T::one().max(h.norm_fro());
    let n = phi.dim();
    let mut used = vec![false; n];
    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for (k, (e, v)) in phi.eigenvalues.iter().zip(&phi.right_vectors).enumerate() {
        let target = e.conj();
        let mut dists: Vec<(usize, T)> = adjoint
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(j, mu)| (j, (mu - target).norm()))
            .collect();
        dists.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let (best, d) = dists[0];
        if d > window {
            return Err(Error::PairingFailed {
                index: k,
                distance: d.to_f64_lossy(),
            });
        }
        if dists.len() > 1 && dists[1].1 <= window {
            return Err(Error::PairingAmbiguous { index: k });
        }
        if used[best] {
            return Err(Error::PairingAmbiguous { index: k });
        }
        used[best] = true;
        let raw = &adjoint.right_vectors[best];
        let overlap = v.dot(raw);
        if overlap.norm() == T::zero() {
            return Err(Error::PairingFailed {
                index: k,
                distance: f64::INFINITY,
            });
        }
        let psi = raw.scale(cr(T::one()) / overlap);
        eigenvalues.push(adjoint.eigenvalues[best]);
        residuals.push(adjoint.residuals[best]);
        vectors.push(psi);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        right_vectors: vectors,
        residuals,
    })
}

/// The complete biorthogonal structure attached to a Hamiltonian.
///
/// Immutable after construction.
#[derive(Debug, Clone)]
pub struct BiorthogonalSystem<T> {
    h: ComplexMatrix<T>,
    h_dagger: ComplexMatrix<T>,
    eigenvalues: Vec<Complex<T>>,
    phi: Vec<ComplexVector<T>>,
    psi: Vec<ComplexVector<T>>,
    s_phi: ComplexMatrix<T>,
    s_psi: ComplexMatrix<T>,
    s_phi_half: ComplexMatrix<T>,
    s_psi_half: ComplexMatrix<T>,
    h0: ComplexMatrix<T>,
    e: Vec<ComplexVector<T>>,
    spectrum: SpectrumClass<T>,
    condition: T,
    quality: Quality,
    normalization: NormalizationPolicy,
    tol: Tolerances,
}

impl<T: Real> BiorthogonalSystem<T> {
    /// Diagonalises `H` and `H†`, pairs and normalises the eigenvectors, and
    /// assembles the metric structure.
    pub fn build(
        h: &ComplexMatrix<T>,
        normalization: NormalizationPolicy,
        tol: &Tolerances,
    ) -> Result<Self> {
        let right = eigen_general(h, tol)?;
        let phi = right
            .right_vectors
            .iter()
            .map(|v| normalization.apply(v))
            .collect::<Result<Vec<_>>>()?;
        let right = EigenDecomposition {
            right_vectors: phi,
            ..right
        };
        let left = pair_adjoint_eigensystem(h, &right, tol)?;
        Self::from_pairs(
            h,
            right.eigenvalues,
            right.right_vectors,
            left.right_vectors,
            normalization,
            tol,
        )
    }

    /// Assembles the structure from already biorthonormal pairs
    /// `H φ_k = E_k φ_k`, `H† Ψ_k = conj(E_k) Ψ_k`, `<φ_k, Ψ_l> = δ_kl`.
    pub fn from_pairs(
        h: &ComplexMatrix<T>,
        eigenvalues: Vec<Complex<T>>,
        phi: Vec<ComplexVector<T>>,
        psi: Vec<ComplexVector<T>>,
        normalization: NormalizationPolicy,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = h.dim();
        for v in phi.iter().chain(&psi) {
            crate::linalg::check_dims(n, v.dim())?;
        }
        crate::linalg::check_dims(n, eigenvalues.len())?;
        crate::linalg::check_dims(n, phi.len())?;
        crate::linalg::check_dims(n, psi.len())?;

        let s_phi = frame_operator(&phi);
        let s_psi = frame_operator(&psi);
        let s_phi_half = sqrt_psd(&s_phi, tol)?;
        let s_psi_half = sqrt_psd(&s_psi, tol)?;
        let condition = condition_number(&s_phi, tol)?;
        let quality = if condition > T::lit(tol.cond_limit) {
            if tol.strict_conditioning {
                return Err(Error::IllConditioned {
                    condition: condition.to_f64_lossy(),
                    limit: tol.cond_limit,
                });
            }
            Quality::IllConditioned
        } else {
            Quality::Good
        };
        let h0 = &(&s_psi_half * h) * &s_phi_half;
        let e = phi.iter().map(|v| s_psi_half.matvec(v)).collect();
        let spectrum = classify_spectrum(&eigenvalues, tol.real_tol);
        Ok(Self {
            h: h.clone(),
            h_dagger: h.dagger(),
            eigenvalues,
            phi,
            psi,
            s_phi,
            s_psi,
            s_phi_half,
            s_psi_half,
            h0,
            e,
            spectrum,
            condition,
            quality,
            normalization,
            tol: *tol,
        })
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }
    pub fn h(&self) -> &ComplexMatrix<T> {
        &self.h
    }
    pub fn h_dagger(&self) -> &ComplexMatrix<T> {
        &self.h_dagger
    }
    pub fn eigenvalues(&self) -> &[Complex<T>] {
        &self.eigenvalues
    }
    pub fn phi(&self) -> &[ComplexVector<T>] {
        &self.phi
    }
    pub fn psi(&self) -> &[ComplexVector<T>] {
        &self.psi
    }
    pub fn e(&self) -> &[ComplexVector<T>] {
        &self.e
    }
    pub fn s_phi(&self) -> &ComplexMatrix<T> {
        &self.s_phi
    }
    pub fn s_psi(&self) -> &ComplexMatrix<T> {
        &self.s_psi
    }
    pub fn s_phi_half(&self) -> &ComplexMatrix<T> {
        &self.s_phi_half
    }
    pub fn s_psi_half(&self) -> &ComplexMatrix<T> {
        &self.s_psi_half
    }
    pub fn h0(&self) -> &ComplexMatrix<T> {
        &self.h0
    }
    pub fn spectrum(&self) -> SpectrumClass<T> {
        self.spectrum
    }
    /// `cond(S_phi)`, the ratio of its extreme eigenvalues.
    pub fn condition(&self) -> T {
        self.condition
    }
    pub fn quality(&self) -> Quality {
        self.quality
    }
    pub fn normalization(&self) -> NormalizationPolicy {
        self.normalization
    }
    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Residuals of every structural identity. The intertwining and `H0`
    /// Hermiticity entries are only expected to vanish for real spectra.
    pub fn diagnostics(&self) -> StructureDiagnostics<T> {
        let n = self.dim();
        let id = ComplexMatrix::identity(n);
        let mut biorthonormality = T::zero();
        let mut e_orthonormality = T::zero();
        for k in 0..n {
            for l in 0..n {
                let delta = if k == l { T::one() } else { T::zero() };
                biorthonormality =
                    biorthonormality.max((self.phi[k].dot(&self.psi[l]) - cr(delta)).norm());
                e_orthonormality =
                    e_orthonormality.max((self.e[k].dot(&self.e[l]) - cr(delta)).norm());
            }
        }
        let mut resolution = ComplexMatrix::zeros(n);
        for (f, p) in self.phi.iter().zip(&self.psi) {
            resolution += &ComplexMatrix::outer(f, p);
        }
        let mut s_mapping = T::zero();
        let mut eigen_residual = T::zero();
        let mut adjoint_eigen_residual = T::zero();
        let mut h0_eigen_residual = T::zero();
        for k in 0..n {
            let e = self.eigenvalues[k];
            s_mapping = s_mapping
                .max(self.s_phi.matvec(&self.psi[k]).distance(&self.phi[k]))
                .max(self.s_psi.matvec(&self.phi[k]).distance(&self.psi[k]));
            eigen_residual = eigen_residual
                .max(self.h.matvec(&self.phi[k]).distance(&self.phi[k].scale(e)));
            adjoint_eigen_residual = adjoint_eigen_residual.max(
                self.h_dagger
                    .matvec(&self.psi[k])
                    .distance(&self.psi[k].scale(e.conj())),
            );
            h0_eigen_residual =
                h0_eigen_residual.max(self.h0.matvec(&self.e[k]).distance(&self.e[k].scale(e)));
        }
        let h0_second_form = &(&self.s_phi_half * &self.h_dagger) * &self.s_psi_half;
        StructureDiagnostics {
            biorthonormality,
            resolution_of_identity: resolution.distance(&id),
            metric_inverse: (&self.s_phi * &self.s_psi).distance(&id),
            s_mapping,
            intertwining_psi: (&self.s_psi * &self.h).distance(&(&self.h_dagger * &self.s_psi)),
            intertwining_phi: (&self.s_phi * &self.h_dagger).distance(&(&self.h * &self.s_phi)),
            h0_hermitian: self.h0.distance(&self.h0.dagger()),
            h0_similarity_forms: self.h0.distance(&h0_second_form),
            e_orthonormality,
            eigen_residual,
            adjoint_eigen_residual,
            h0_eigen_residual,
            square_roots: (&self.s_phi_half * &self.s_phi_half)
                .distance(&self.s_phi)
                .max((&self.s_psi_half * &self.s_psi_half).distance(&self.s_psi))
                .max((&self.s_phi_half * &self.s_psi_half).distance(&id)),
        }
    }
}

/// `Σ_k |v_k><v_k|`.
pub fn frame_operator<T: Real>(vectors: &[ComplexVector<T>]) -> ComplexMatrix<T> {
    let n = vectors.first().map_or(0, |v| v.dim());
    let mut s = ComplexMatrix::zeros(n);
    for v in vectors {
        s += &ComplexMatrix::outer(v, v);
    }
    // Exact Hermitian symmetry.
    for i in 0..n {
        s[(i, i)] = cr(s[(i, i)].re);
        for j in 0..i {
            s[(i, j)] = s[(j, i)].conj();
        }
    }
    s
}

/// Residuals (Frobenius or max-abs) of the biorthogonal structure identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureDiagnostics<T> {
    /// `max |<φ_k, Ψ_l> - δ_kl|`
    pub biorthonormality: T,
    /// `‖Σ|φ_k><Ψ_k| - I‖`
    pub resolution_of_identity: T,
    /// `‖S_phi S_psi - I‖`
    pub metric_inverse: T,
    /// `max ‖S_phi Ψ_k - φ_k‖, ‖S_psi φ_k - Ψ_k‖`
    pub s_mapping: T,
    /// `‖S_psi H - H† S_psi‖`
    pub intertwining_psi: T,
    /// `‖S_phi H† - H S_phi‖`
    pub intertwining_phi: T,
    /// `‖H0 - H0†‖`
    pub h0_hermitian: T,
    /// `‖S_psi^{1/2} H S_phi^{1/2} - S_phi^{1/2} H† S_psi^{1/2}‖`
    pub h0_similarity_forms: T,
    /// `max |<e_k, e_l> - δ_kl|`
    pub e_orthonormality: T,
    pub eigen_residual: T,
    pub adjoint_eigen_residual: T,
    pub h0_eigen_residual: T,
    /// Square roots square back and are mutually inverse.
    pub square_roots: T,
}

impl<T: Real> StructureDiagnostics<T> {
    /// `(name, residual, meaningful only for real spectra)` triples.
    pub fn entries(&self) -> Vec<(&'static str, T, bool)> {
        vec![
            ("biorthonormality", self.biorthonormality, false),
            ("resolution_of_identity", self.resolution_of_identity, false),
            ("metric_inverse", self.metric_inverse, false),
            ("s_mapping", self.s_mapping, false),
            ("intertwining_psi", self.intertwining_psi, true),
            ("intertwining_phi", self.intertwining_phi, true),
            ("h0_hermitian", self.h0_hermitian, true),
            ("h0_similarity_forms", self.h0_similarity_forms, true),
            ("e_orthonormality", self.e_orthonormality, false),
            ("eigen_residual", self.eigen_residual, false),
            ("adjoint_eigen_residual", self.adjoint_eigen_residual, false),
            ("h0_eigen_residual", self.h0_eigen_residual, false),
            ("square_roots", self.square_roots, false),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    type M = ComplexMatrix<f64>;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn classify() {
        let s = classify_spectrum(&[c(1.0f64, 0.0), c(-2.0, 0.0)], 1e-10);
        assert_eq!(s.kind, SpectrumKind::AllReal);
        let s = classify_spectrum(&[c(1.0f64, 0.1), c(1.0, -0.1)], 1e-10);
        assert_eq!(s.kind, SpectrumKind::SomeComplex);
        assert!((s.max_imag - 0.1).abs() < 1e-16);
    }

    #[test]
    fn hermitian_input_reduces_to_orthonormal_structure() {
        let h = M::from_rows(vec![
            vec![c(1.0, 0.0), c(0.5, 0.5), c(0.0, 0.0)],
            vec![c(0.5, -0.5), c(-1.0, 0.0), c(0.2, 0.0)],
            vec![c(0.0, 0.0), c(0.2, 0.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let sys = BiorthogonalSystem::build(&h, NormalizationPolicy::UnitPhi, &tol()).unwrap();
        let id = M::identity(3);
        assert!(sys.s_phi().distance(&id) < 1e-12);
        assert!(sys.s_psi().distance(&id) < 1e-12);
        assert!(sys.h0().distance(&h) < 1e-12);
        for k in 0..3 {
            assert!(sys.phi()[k].distance(&sys.psi()[k]) < 1e-12);
            assert!(sys.phi()[k].distance(&sys.e()[k]) < 1e-12);
        }
    }

    #[test]
    fn pairing_is_independent_of_input_order() {
        let h = M::from_rows(vec![
            vec![c(1.0, 0.0), c(2.0, 0.3), c(0.0, 1.0)],
            vec![c(0.1, 0.0), c(-1.0, 0.0), c(0.5, 0.0)],
            vec![c(0.0, 0.0), c(0.3, -0.2), c(3.0, 0.0)],
        ])
        .unwrap();
        let right = eigen_general(&h, &tol()).unwrap();
        let paired = pair_adjoint_eigensystem(&h, &right, &tol()).unwrap();
        let perm = [2usize, 0, 1];
        let shuffled = EigenDecomposition {
            eigenvalues: perm.iter().map(|&i| right.eigenvalues[i]).collect(),
            right_vectors: perm.iter().map(|&i| right.right_vectors[i].clone()).collect(),
            residuals: perm.iter().map(|&i| right.residuals[i]).collect(),
        };
        let paired2 = pair_adjoint_eigensystem(&h, &shuffled, &tol()).unwrap();
        for (pos, &i) in perm.iter().enumerate() {
            assert!(paired2.right_vectors[pos].distance(&paired.right_vectors[i]) < 1e-12);
            assert!((paired2.eigenvalues[pos] - right.eigenvalues[i].conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn unit_phi_policy_fixes_phase() {
        let v = ComplexVector::from_vec(vec![c(0.0f64, 1.0), c(0.0, -3.0)]);
        let u = NormalizationPolicy::UnitPhi.apply(&v).unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-15);
        assert!(u[1].im.abs() < 1e-15 && u[1].re > 0.0);
    }

    #[test]
    fn sds_policy_needs_first_component() {
        let v = ComplexVector::<f64>::basis(2, 1);
        assert!(matches!(
            NormalizationPolicy::Sds.apply(&v),
            Err(Error::ParameterOutOfRange { .. })
        ));
    }

    #[test]
    fn complex_spectrum_is_flagged_and_not_intertwined() {
        // Eigenvalues 1 ± 0.2i.
        let h = M::from_real_rows(&[vec![1.0, 0.2], vec![-0.2, 1.0]]).unwrap();
        let mut h = h;
        h[(0, 1)] = c(0.4, 0.0);
        h[(1, 0)] = c(-0.1, 0.0);
        let sys = BiorthogonalSystem::build(&h, NormalizationPolicy::UnitPhi, &tol()).unwrap();
        assert_eq!(sys.spectrum().kind, SpectrumKind::SomeComplex);
        assert!((sys.spectrum().max_imag - 0.2).abs() < 1e-12);
        let d = sys.diagnostics();
        assert!(d.intertwining_psi > 1e-3);
        assert!(d.h0_hermitian > 1e-3);
        assert!(d.biorthonormality < 1e-12);
        assert!(d.e_orthonormality < 1e-12);
        assert!(d.h0_eigen_residual < 1e-12);
    }

    #[test]
    fn strict_conditioning_fails_instead_of_flagging() {
        let eps = 1e-5;
        // Nearly parallel eigenvectors.
        let h = M::from_real_rows(&[vec![0.0, 1.0], vec![eps * eps, 0.0]]).unwrap();
        let mut t = tol();
        t.cond_limit = 10.0;
        let sys = BiorthogonalSystem::build(&h, NormalizationPolicy::UnitPhi, &t).unwrap();
        assert_eq!(sys.quality(), Quality::IllConditioned);
        t.strict_conditioning = true;
        assert!(matches!(
            BiorthogonalSystem::build(&h, NormalizationPolicy::UnitPhi, &t),
            Err(Error::IllConditioned { .. })
        ));
    }
}
