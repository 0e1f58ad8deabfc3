//! Two-level pseudo-fermions: `{a, b} = I`, `{a, a} = {b, b} = 0` with
//! `b != a†`, and the two-level model `H = -g [[0, 1-k], [1+k, 0]]` built on them.

use num_complex::Complex;

use crate::audit::Check;
use crate::biortho::{frame_operator, BiorthogonalSystem, NormalizationPolicy};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::linalg::{eigen_hermitian, solve, spectral_norm, ComplexMatrix, ComplexVector};
use crate::scalar::{cone, cr, czero, Real};

/// Residual level at which the anticommutation rules count as satisfied.
pub const PF_TOL: f64 = 1e-10;

/// How the vacua are scaled. The pair product is always fixed by
/// `<φ0, Ψ0> = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PfNormalization<T> {
    /// `‖φ0‖ = 1`, largest component real positive.
    UnitVacuum,
    /// `φ0 = N_phi · v` where `v` is the kernel vector of `a` whose first
    /// nonzero component is 1.
    Amplitude(Complex<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoFermionAlgebra<T> {
    pub a: ComplexMatrix<T>,
    pub b: ComplexMatrix<T>,
    /// `N = b a`
    pub n: ComplexMatrix<T>,
    pub n_dagger: ComplexMatrix<T>,
    pub phi0: ComplexVector<T>,
    pub phi1: ComplexVector<T>,
    pub psi0: ComplexVector<T>,
    pub psi1: ComplexVector<T>,
    /// Amplitudes of `φ0` and `Ψ0` relative to the kernel vectors with
    /// leading component 1.
    pub n_phi: Complex<T>,
    pub n_psi: Complex<T>,
}

impl<T: Real> PseudoFermionAlgebra<T> {
    pub fn phi(&self) -> [&ComplexVector<T>; 2] {
        [&self.phi0, &self.phi1]
    }

    pub fn psi(&self) -> [&ComplexVector<T>; 2] {
        [&self.psi0, &self.psi1]
    }

    pub fn s_phi(&self) -> ComplexMatrix<T> {
        frame_operator(&[self.phi0.clone(), self.phi1.clone()])
    }

    pub fn s_psi(&self) -> ComplexMatrix<T> {
        frame_operator(&[self.psi0.clone(), self.psi1.clone()])
    }

    /// Largest of the three anticommutator residuals.
    pub fn anticommutator_residual(&self) -> T {
        anticommutator_residuals(&self.a, &self.b)
            .into_iter()
            .fold(T::zero(), T::max)
    }
}

fn anticommutator_residuals<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> [T; 3] {
    let id = ComplexMatrix::identity(a.dim());
    [
        a.anticommutator(b).distance(&id),
        a.anticommutator(a).norm_fro(),
        b.anticommutator(b).norm_fro(),
    ]
}

/// One-dimensional kernel of `m`, scaled so its first nonzero component is 1.
fn kernel_vector<T: Real>(
    m: &ComplexMatrix<T>,
    operator: &'static str,
) -> Result<ComplexVector<T>> {
    let gram = &m.dagger() * m;
    let eig = eigen_hermitian(&gram, &Tolerances::default())?;
    let scale = gram.norm_fro().max(T::one());
    let floor = T::lit(PF_TOL) * scale;
    let zeros: Vec<usize> = (0..eig.dim())
        .filter(|&i| eig.eigenvalues[i].re.abs() <= floor)
        .collect();
    if zeros.len() != 1 {
        return Err(Error::KernelNotOneDimensional { operator });
    }
    let v = &eig.right_vectors[zeros[0]];
    let lead = v
        .iter()
        .copied()
        .find(|z| z.norm() > T::lit(1e-8))
        .ok_or(Error::ZeroVector)?;
    Ok(v.scale(cone::<T>() / lead))
}

/// Finds the vacua of `a` and `b†`, builds the raised vectors and number
/// operators, and fixes normalisations so that `<φ0, Ψ0> = 1`.
pub fn build_pf<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    normalization: PfNormalization<T>,
) -> Result<PseudoFermionAlgebra<T>> {
    crate::linalg::check_dims(2, a.dim())?;
    crate::linalg::check_dims(2, b.dim())?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite);
    }
    let limit = T::lit(PF_TOL) * (a.norm_fro() * b.norm_fro()).max(T::one());
    let residual = anticommutator_residuals(a, b)
        .into_iter()
        .fold(T::zero(), T::max);
    if residual > limit {
        return Err(Error::NotPseudoFermionic {
            residual: residual.to_f64_lossy(),
        });
    }
    let raw_phi = kernel_vector(a, "a")?;
    let b_dagger = b.dagger();
    let raw_psi = kernel_vector(&b_dagger, "b†")?;
    let overlap = raw_phi.dot(&raw_psi);
    if overlap.norm() <= T::lit(1e-12) {
        return Err(Error::Singular { pivot: 0 });
    }
    let n_phi = match normalization {
        PfNormalization::Amplitude(z) => {
            if z.norm() == T::zero() || !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::ParameterOutOfRange {
                    name: "n_phi",
                    value: z.norm().to_f64_lossy(),
                    reason: "vacuum amplitude must be finite and nonzero",
                });
            }
            z
        }
        PfNormalization::UnitVacuum => {
            let unit = NormalizationPolicy::UnitPhi.apply(&raw_phi)?;
            unit[0] / raw_phi[0]
        }
    };
    // conj(N_phi) N_psi <v_phi, v_psi> = 1
    let n_psi = cone::<T>() / (n_phi.conj() * overlap);
    let phi0 = raw_phi.scale(n_phi);
    let psi0 = raw_psi.scale(n_psi);
    let phi1 = b.matvec(&phi0);
    let psi1 = a.dagger().matvec(&psi0);
    let n = b * a;
    let n_dagger = n.dagger();
    Ok(PseudoFermionAlgebra {
        a: a.clone(),
        b: b.clone(),
        n,
        n_dagger,
        phi0,
        phi1,
        psi0,
        psi1,
        n_phi,
        n_psi,
    })
}

/// Standard fermion annihilator with `f e1 = e0`.
pub fn car_annihilator<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_rows(vec![vec![czero(), cone()], vec![czero(), czero()]])
        .expect("square")
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraReport<T> {
    pub checks: Vec<Check<T>>,
}

impl<T: Real> AlgebraReport<T> {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check<T>> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Residuals of the ladder, number-operator, biorthonormality and metric
/// relations of a pseudo-fermion algebra, plus `[H, N] = 0` when a system
/// is supplied. Report only; never fails.
pub fn verify_algebra<T: Real>(
    alg: &PseudoFermionAlgebra<T>,
    system: Option<&BiorthogonalSystem<T>>,
) -> AlgebraReport<T> {
    let tol = Tolerances::default();
    let s_phi = alg.s_phi();
    let s_psi = alg.s_psi();
    // Relative slack for conditioning of the similarity behind the algebra.
    let scale = (s_phi.norm_fro() * s_psi.norm_fro()).max(T::one());
    let limit = T::lit(PF_TOL) * scale;
    let id = ComplexMatrix::<T>::identity(2);
    let b_dagger = alg.b.dagger();
    let [r_ab, r_aa, r_bb] = anticommutator_residuals(&alg.a, &alg.b);

    let mut checks = Vec::new();
    let mut push = |name: &str, residual: T| checks.push(Check::new(name, residual, limit));

    push("anticommutator_ab", r_ab);
    push("anticommutator_aa", r_aa);
    push("anticommutator_bb", r_bb);
    push("vacuum_phi", alg.a.matvec(&alg.phi0).norm());
    push("vacuum_psi", b_dagger.matvec(&alg.psi0).norm());
    push(
        "lowering",
        alg.a
            .matvec(&alg.phi1)
            .distance(&alg.phi0)
            .max(b_dagger.matvec(&alg.psi1).distance(&alg.psi0)),
    );
    let mut number_phi = T::zero();
    let mut number_psi = T::zero();
    for (n, (f, p)) in alg.phi().into_iter().zip(alg.psi()).enumerate() {
        let n = cr(T::from_usize(n).unwrap());
        number_phi = number_phi.max(alg.n.matvec(f).distance(&f.scale(n)));
        number_psi = number_psi.max(alg.n_dagger.matvec(p).distance(&p.scale(n)));
    }
    push("number_phi", number_phi);
    push("number_psi", number_psi);
    let mut bio = T::zero();
    for (k, f) in alg.phi().into_iter().enumerate() {
        for (l, p) in alg.psi().into_iter().enumerate() {
            let delta = if k == l { cone() } else { czero() };
            bio = bio.max((f.dot(p) - delta).norm());
        }
    }
    push("biorthonormality", bio);
    push(
        "metric_hermitian",
        s_phi.hermitian_residual().max(s_psi.hermitian_residual()),
    );
    let min_eig = |s: &ComplexMatrix<T>| {
        eigen_hermitian(s, &tol)
            .map(|e| e.eigenvalues.iter().map(|z| z.re).fold(T::infinity(), T::min))
            .unwrap_or(T::neg_infinity())
    };
    let positivity = min_eig(&s_phi).min(min_eig(&s_psi));
    push(
        "metric_positive",
        if positivity > T::lit(tol.psd_floor) { T::zero() } else { T::one() - positivity.min(T::zero()) },
    );
    let bound = |s: &ComplexMatrix<T>, v: [&ComplexVector<T>; 2]| {
        let norm = spectral_norm(s, &tol).unwrap_or(T::infinity());
        (norm - (v[0].norm_sqr() + v[1].norm_sqr())).max(T::zero())
    };
    push("norm_bound_phi", bound(&s_phi, alg.phi()));
    push("norm_bound_psi", bound(&s_psi, alg.psi()));
    let mut mapping = T::zero();
    for (f, p) in alg.phi().into_iter().zip(alg.psi()) {
        mapping = mapping
            .max(s_phi.matvec(p).distance(f))
            .max(s_psi.matvec(f).distance(p));
    }
    push("metric_mapping", mapping);
    push("metric_inverse", (&s_phi * &s_psi).distance(&id));
    push(
        "intertwining_psi",
        (&s_psi * &alg.n).distance(&(&alg.n_dagger * &s_psi)),
    );
    push(
        "intertwining_phi",
        (&s_phi * &alg.n_dagger).distance(&(&alg.n * &s_phi)),
    );
    if let Some(sys) = system {
        let h = sys.h();
        let rel = h.commutator(&alg.n).norm_fro() / h.norm_fro().max(T::one());
        push("hamiltonian_commutes_with_number", rel);
    }
    AlgebraReport { checks }
}

/// The two-level model `H = -g [[0, 1-k], [1+k, 0]]` with its
/// pseudo-fermionic structure.
///
/// Index 0 of the system is the vacuum `φ0` (`a φ0 = 0`). Its eigenvalue is
/// read off `<Ψ0, H φ0>` and equals `-ρ = g √(1-k²)`.
#[derive(Debug, Clone)]
pub struct SdsModel<T> {
    pub g: T,
    pub k: T,
    /// `√((1+k)/(1-k))`
    pub alpha: T,
    /// `-g √(1-k²)`
    pub rho: T,
    /// Least-squares fit of `H ≈ omega N + shift I`.
    pub omega: T,
    pub shift: T,
    pub fit_residual: T,
    pub h: ComplexMatrix<T>,
    pub algebra: PseudoFermionAlgebra<T>,
    pub system: BiorthogonalSystem<T>,
    /// `S_psi^{1/2} a S_phi^{1/2}`
    pub c: ComplexMatrix<T>,
    /// `c† c`
    pub n0: ComplexMatrix<T>,
    pub display: DisplayDeviations<T>,
}

/// Distances between computed matrices and the forms a reader might find
/// in the literature; reported, never asserted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplayDeviations<T> {
    /// `‖c - ½[[1, 1/α], [-1, -1]]‖`
    pub c: T,
    /// `‖N0 - ½[[1, 1/α], [1, 1]]‖`
    pub n0: T,
    /// `‖H0 - ρ[[0, -1], [-1, 0]]‖`
    pub h0: T,
    /// `‖H - (2ρ N + ρ I)‖`
    pub decomposition: T,
    /// `|E0 - ρ|`
    pub ground_energy: T,
}

pub fn sds_hamiltonian<T: Real>(g: T, k: T) -> ComplexMatrix<T> {
    ComplexMatrix::from_real_rows(&[
        vec![T::zero(), -g * (T::one() - k)],
        vec![-g * (T::one() + k), T::zero()],
    ])
    .expect("square")
}

/// `(a, b)` for the given `k`.
pub fn sds_operators<T: Real>(k: T) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let alpha = ((T::one() + k) / (T::one() - k)).sqrt();
    let half = T::lit(0.5);
    let a = ComplexMatrix::from_real_rows(&[
        vec![half, half / alpha],
        vec![-half * alpha, -half],
    ])
    .expect("square");
    let b = ComplexMatrix::from_real_rows(&[
        vec![half, -half / alpha],
        vec![half * alpha, -half],
    ])
    .expect("square");
    (a, b)
}

pub fn build_sds<T: Real>(
    g: T,
    k: T,
    policy: NormalizationPolicy,
    tol: &Tolerances,
) -> Result<SdsModel<T>> {
    if !k.is_finite() || k.abs() >= T::one() {
        return Err(Error::ParameterOutOfRange {
            name: "k",
            value: k.to_f64_lossy(),
            reason: "must lie strictly between -1 and 1",
        });
    }
    if !g.is_finite() || g == T::zero() {
        return Err(Error::ParameterOutOfRange {
            name: "g",
            value: g.to_f64_lossy(),
            reason: "must be finite and nonzero",
        });
    }
    let alpha = ((T::one() + k) / (T::one() - k)).sqrt();
    let rho = -g * (T::one() - k * k).sqrt();
    let h = sds_hamiltonian(g, k);
    let (a, b) = sds_operators(k);
    let pf_norm = match policy {
        NormalizationPolicy::Sds => PfNormalization::Amplitude(cr(T::FRAC_1_SQRT_2())),
        NormalizationPolicy::UnitPhi => PfNormalization::UnitVacuum,
    };
    let algebra = build_pf(&a, &b, pf_norm)?;

    let system = system_from_algebra(&h, &algebra, policy, tol)?;

    let (omega, shift, fit_residual) = fit_number_decomposition(&h, &algebra.n)?;
    let c = &(system.s_psi_half() * &a) * system.s_phi_half();
    let n0 = &c.dagger() * &c;

    let half = T::lit(0.5);
    let id = ComplexMatrix::identity(2);
    let c_display =
        ComplexMatrix::from_real_rows(&[vec![half, half / alpha], vec![-half, -half]]).unwrap();
    let n0_display =
        ComplexMatrix::from_real_rows(&[vec![half, half / alpha], vec![half, half]]).unwrap();
    let h0_display =
        ComplexMatrix::from_real_rows(&[vec![T::zero(), -rho], vec![-rho, T::zero()]]).unwrap();
    let two_rho = rho + rho;
    let decomposition_display = &algebra.n.scale_real(two_rho) + &id.scale_real(rho);
    let display = DisplayDeviations {
        c: c.distance(&c_display),
        n0: n0.distance(&n0_display),
        h0: system.h0().distance(&h0_display),
        decomposition: h.distance(&decomposition_display),
        ground_energy: (system.eigenvalues()[0] - cr(rho)).norm(),
    };

    Ok(SdsModel {
        g,
        k,
        alpha,
        rho,
        omega,
        shift,
        fit_residual,
        h,
        algebra,
        system,
        c,
        n0,
        display,
    })
}

/// Biorthogonal system of a Hamiltonian diagonal in the number basis of
/// `alg` (for example `ω N + s I`), indexed by occupation number: index 0
/// is the vacuum. Eigenvalues are `<Ψ_n, H φ_n>`; the pairs are checked to
/// be eigenpairs and the spectrum to be non-degenerate.
pub fn system_from_algebra<T: Real>(
    h: &ComplexMatrix<T>,
    alg: &PseudoFermionAlgebra<T>,
    policy: NormalizationPolicy,
    tol: &Tolerances,
) -> Result<BiorthogonalSystem<T>> {
    crate::linalg::check_dims(2, h.dim())?;
    let scale = h.norm_fro().max(T::min_positive_value());
    let mut eigenvalues = Vec::with_capacity(2);
    let mut phi = Vec::with_capacity(2);
    let mut psi = Vec::with_capacity(2);
    for (index, (f, p)) in alg_pairs(alg).into_iter().enumerate() {
        let f_n = policy.apply(f)?;
        // keep <φ, Ψ> = 1 under the rescaling φ -> s φ
        let s = f.dot(&f_n) / cr(f.norm_sqr());
        let p_n = p.scale(cone::<T>() / s.conj());
        let e = p_n.dot(&h.matvec(&f_n));
        let residual = h.matvec(&f_n).distance(&f_n.scale(e)) / f_n.norm();
        if residual > T::lit(tol.eig_tol) * scale.max(T::one()) {
            return Err(Error::PairingFailed {
                index,
                distance: residual.to_f64_lossy(),
            });
        }
        eigenvalues.push(e);
        phi.push(f_n);
        psi.push(p_n);
    }
    let gap = (eigenvalues[0] - eigenvalues[1]).norm();
    let threshold = T::lit(tol.gap_tol) * scale;
    if gap < threshold {
        return Err(Error::DegenerateSpectrum {
            gap: gap.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }
    BiorthogonalSystem::from_pairs(h, eigenvalues, phi, psi, policy, tol)
}

fn alg_pairs<T: Real>(alg: &PseudoFermionAlgebra<T>) -> [(&ComplexVector<T>, &ComplexVector<T>); 2] {
    [(&alg.phi0, &alg.psi0), (&alg.phi1, &alg.psi1)]
}

/// Least squares for `H ≈ ω N + s I` in the Frobenius inner product.
fn fit_number_decomposition<T: Real>(
    h: &ComplexMatrix<T>,
    n: &ComplexMatrix<T>,
) -> Result<(T, T, T)> {
    let id = ComplexMatrix::identity(h.dim());
    let ip = |x: &ComplexMatrix<T>, y: &ComplexMatrix<T>| {
        x.as_slice()
            .iter()
            .zip(y.as_slice())
            .fold(czero::<T>(), |acc, (p, q)| acc + p.conj() * q)
    };
    let gram = ComplexMatrix::from_rows(vec![
        vec![ip(n, n), ip(n, &id)],
        vec![ip(&id, n), ip(&id, &id)],
    ])?;
    let rhs = ComplexVector::from_vec(vec![ip(n, h), ip(&id, h)]);
    let sol = solve(&gram, &rhs)?;
    let fitted = &n.scale(sol[0]) + &id.scale(sol[1]);
    Ok((sol[0].re, sol[1].re, h.distance(&fitted)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn car_case_gives_coordinate_vectors() {
        let f = car_annihilator::<f64>();
        let alg = build_pf(&f, &f.dagger(), PfNormalization::UnitVacuum).unwrap();
        assert!(alg.phi0.distance(&ComplexVector::basis(2, 0)) < 1e-14);
        assert!(alg.phi1.distance(&ComplexVector::basis(2, 1)) < 1e-14);
        assert!(alg.psi0.distance(&alg.phi0) < 1e-14);
        assert!(alg.psi1.distance(&alg.phi1) < 1e-14);
        assert!(verify_algebra(&alg, None).all_pass());
    }

    #[test]
    fn sds_vacua_match_closed_form() {
        let (a, b) = sds_operators(0.5f64);
        let amp = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let alg = build_pf(&a, &b, PfNormalization::Amplitude(amp)).unwrap();
        let s3 = 3f64.sqrt();
        let want_phi0 = ComplexVector::from_real(&[1.0, -s3]).scale(amp);
        let want_psi0 = ComplexVector::from_real(&[1.0, -1.0 / s3]).scale(amp);
        assert!(alg.phi0.distance(&want_phi0) < 1e-14);
        assert!(alg.psi0.distance(&want_psi0) < 1e-14);
        assert!((alg.n_psi - amp).norm() < 1e-14);
    }

    #[test]
    fn corrupted_operator_is_rejected() {
        let (a, b) = sds_operators(0.5f64);
        let bad = &b + &ComplexMatrix::identity(2).scale_real(0.1);
        assert!(matches!(
            build_pf(&a, &bad, PfNormalization::UnitVacuum),
            Err(Error::NotPseudoFermionic { .. })
        ));
    }

    #[test]
    fn sds_parameter_validation() {
        let tol = Tolerances::default();
        for k in [1.0, -1.0, 1.2, f64::NAN] {
            assert!(matches!(
                build_sds(1.0, k, NormalizationPolicy::Sds, &tol),
                Err(Error::ParameterOutOfRange { name: "k", .. })
            ));
        }
        assert!(matches!(
            build_sds(0.0, 0.5, NormalizationPolicy::Sds, &tol),
            Err(Error::ParameterOutOfRange { name: "g", .. })
        ));
    }

    #[test]
    fn sds_derived_objects() {
        let m = build_sds(1.0, 0.5, NormalizationPolicy::Sds, &Tolerances::default()).unwrap();
        let e = 0.75f64.sqrt();
        assert!((m.system.eigenvalues()[0] - c(e, 0.0)).norm() < 1e-12);
        assert!((m.system.eigenvalues()[1] - c(-e, 0.0)).norm() < 1e-12);
        assert!(m.system.s_phi().distance(&ComplexMatrix::from_real_diagonal(&[1.0, 3.0])) < 1e-12);
        assert!((m.omega + 2.0 * e).abs() < 1e-12);
        assert!((m.shift - e).abs() < 1e-12);
        assert!(m.fit_residual < 1e-12);
        let c_want = ComplexMatrix::from_real_rows(&[vec![0.5, 0.5], vec![-0.5, -0.5]]).unwrap();
        assert!(m.c.distance(&c_want) < 1e-12);
        assert!(m.n0.hermitian_residual() < 1e-12);
        assert!(m.display.ground_energy > 1.0);
        assert!(verify_algebra(&m.algebra, Some(&m.system)).all_pass());
    }
}
