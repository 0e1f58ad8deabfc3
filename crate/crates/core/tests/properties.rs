use nhqdyn::audit::relative_distance;
use nhqdyn::dynamics::{heisenberg, propagator_at, propagator_series};
use nhqdyn::linalg::{eigen_hermitian, expm_series, sqrt_psd};
use nhqdyn::metric::{self, adjoint, inner, norm, norm_sqr};
use nhqdyn::transition::probability;
use nhqdyn::*;
use proptest::prelude::*;

fn system(seed: u64, n: usize) -> System {
    let mut ens = Ensemble::new(seed);
    let h = ens.real_spectrum_matrix::<f64>(n, 0.25, 0.6).unwrap();
    System::build(&h, NormalizationPolicy::UnitPhi, &Tolerances::default()).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn adjoint_involution_and_reversal(seed in any::<u64>(), n in 2usize..=6) {
        let sys = system(seed, n);
        let mut ens = Ensemble::new(seed ^ 0xA5A5);
        let x = ens.matrix::<f64>(n);
        let y = ens.matrix::<f64>(n);
        for kind in MetricKind::ALL {
            let ax = adjoint(&sys, kind, &x).unwrap();
            prop_assert!(relative_distance(&adjoint(&sys, kind, &ax).unwrap(), &x) < 1e-10);
            let lhs = adjoint(&sys, kind, &(&x * &y)).unwrap();
            let rhs = &adjoint(&sys, kind, &y).unwrap() * &ax;
            prop_assert!(relative_distance(&lhs, &rhs) < 1e-10);
        }
    }

    #[test]
    fn adjoint_is_compatible_with_inner_product(seed in any::<u64>(), n in 2usize..=6) {
        let sys = system(seed, n);
        let mut ens = Ensemble::new(seed.wrapping_add(1));
        let x = ens.matrix::<f64>(n);
        let f = ens.unit_vector::<f64>(n);
        let g = ens.unit_vector::<f64>(n);
        for kind in MetricKind::ALL {
            let ax = adjoint(&sys, kind, &x).unwrap();
            let l = inner(&sys, kind, &x.matvec(&f), &g).unwrap();
            let r = inner(&sys, kind, &f, &ax.matvec(&g)).unwrap();
            prop_assert!((l - r).norm() < 1e-10 * (1.0 + l.norm()));
        }
    }

    #[test]
    fn bridge_between_flat_and_sharp(seed in any::<u64>(), n in 2usize..=6) {
        let sys = system(seed, n);
        let x = Ensemble::new(!seed).matrix::<f64>(n);
        let flat = adjoint(&sys, MetricKind::Phi, &x).unwrap();
        let sharp = adjoint(&sys, MetricKind::Psi, &x).unwrap();
        let s_psi2 = sys.s_psi() * sys.s_psi();
        let s_phi2 = sys.s_phi() * sys.s_phi();
        prop_assert!(relative_distance(&flat, &(&(&s_psi2 * &sharp) * &s_phi2)) < 1e-9);
    }

    #[test]
    fn norm_equivalence_and_cauchy_schwarz(seed in any::<u64>(), n in 2usize..=6) {
        let sys = system(seed, n);
        let tol = Tolerances::default();
        let f = Ensemble::new(seed ^ 7).vector::<f64>(n);
        let upper = linalg::spectral_norm(sys.s_phi_half(), &tol).unwrap();
        let lower = 1.0 / linalg::spectral_norm(sys.s_psi_half(), &tol).unwrap();
        let nf = norm(&sys, MetricKind::Phi, &f).unwrap();
        prop_assert!(nf <= upper * f.norm() * (1.0 + 1e-12));
        prop_assert!(nf >= lower * f.norm() * (1.0 - 1e-12));
        let sf = sys.s_phi().matvec(&f);
        let lhs = norm_sqr(&sys, MetricKind::Phi, &f).unwrap()
            * norm_sqr(&sys, MetricKind::Psi, &sf).unwrap();
        let rhs = inner(&sys, MetricKind::Standard, &sf, &f).unwrap().norm_sqr();
        prop_assert!(lhs >= rhs * (1.0 - 1e-12));
    }

    #[test]
    fn inner_product_forms_agree(seed in any::<u64>(), n in 2usize..=6) {
        let sys = system(seed, n);
        let mut ens = Ensemble::new(seed ^ 3);
        let f = ens.unit_vector::<f64>(n);
        let g = ens.unit_vector::<f64>(n);
        for kind in MetricKind::ALL {
            let a = inner(&sys, kind, &f, &g).unwrap();
            let b = metric::inner_half_form(&sys, kind, &f, &g).unwrap();
            prop_assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn propagator_group_law(seed in any::<u64>(), n in 2usize..=6, t in -3.0f64..3.0, s in -3.0f64..3.0) {
        let sys = system(seed, n);
        for gen in GeneratorKind::ALL {
            let lhs = propagator_at(&sys, gen, t + s);
            let rhs = &propagator_at(&sys, gen, t) * &propagator_at(&sys, gen, s);
            prop_assert!(relative_distance(&lhs, &rhs) < 1e-9);
        }
    }

    #[test]
    fn picture_consistency(seed in any::<u64>(), n in 2usize..=6, t in 0.0f64..5.0) {
        // Φ_Ψ(0) = S_psi^{-1/2} Φ(0)  ⟹  Φ_Ψ(t) = S_psi^{-1/2} Φ(t), S_psi^{-1/2} = S_phi^{1/2}
        let sys = system(seed, n);
        let phi0 = Ensemble::new(seed ^ 11).unit_vector::<f64>(n);
        let phi_t = propagator_at(&sys, GeneratorKind::H0, t).matvec(&phi0);
        let psi_t = propagator_at(&sys, GeneratorKind::H, t).matvec(&sys.s_phi_half().matvec(&phi0));
        prop_assert!(psi_t.distance(&sys.s_phi_half().matvec(&phi_t)) < 1e-9);
    }

    #[test]
    fn expectation_duality(seed in any::<u64>(), n in 2usize..=6, t in 0.0f64..5.0) {
        let sys = system(seed, n);
        let mut ens = Ensemble::new(seed ^ 13);
        let x = ens.matrix::<f64>(n);
        let xi = ens.unit_vector::<f64>(n);
        let xt = heisenberg(&sys, Picture::Psi, &x, t).unwrap();
        let lhs = inner(&sys, MetricKind::Psi, &xi, &xt.matvec(&xi)).unwrap();
        let xi_t = propagator_at(&sys, GeneratorKind::H, t).matvec(&xi);
        let rhs = inner(&sys, MetricKind::Psi, &xi_t, &x.matvec(&xi_t)).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()));
    }

    #[test]
    fn probabilities_are_bounded_symmetric_and_scale_free(seed in any::<u64>(), n in 2usize..=6) {
        let sys = system(seed, n);
        let mut ens = Ensemble::new(seed ^ 17);
        let f = ens.vector::<f64>(n);
        let g = ens.vector::<f64>(n);
        let z = ens.complex::<f64>() * 3.0;
        let w = ens.complex::<f64>() * 0.2;
        for law in ProbabilityLaw::ALL {
            let p = probability(&sys, law, &f, &g).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            let q = probability(&sys, law, &g, &f).unwrap();
            prop_assert!((p - q).abs() < 1e-12);
            let r = probability(&sys, law, &f.scale(z), &g.scale(w)).unwrap();
            prop_assert!((p - r).abs() < 1e-12);
        }
    }

    #[test]
    fn laws_collapse_for_hermitian_generators(seed in any::<u64>(), n in 2usize..=6) {
        let mut ens = Ensemble::new(seed);
        let h = ens.hermitian::<f64>(n);
        let sys = System::build(&h, NormalizationPolicy::UnitPhi, &Tolerances::default()).unwrap();
        let grid = TimeGrid::linspace(0.0, 4.0, 40).unwrap();
        let f = ens.vector::<f64>(n);
        let g = ens.vector::<f64>(n);
        let trace = transition_trace(&sys, &ProbabilityLaw::ALL, &f, &g, GeneratorKind::H, &grid).unwrap();
        for i in 0..grid.len() {
            prop_assert!((trace.values[0][i] - trace.values[1][i]).abs() < 1e-12);
            prop_assert!((trace.values[0][i] - trace.values[2][i]).abs() < 1e-12);
        }
    }

    #[test]
    fn hermitian_eigensystem_reconstructs(seed in any::<u64>(), n in 1usize..=8) {
        let a = Ensemble::new(seed).hermitian::<f64>(n);
        let eig = eigen_hermitian(&a, &Tolerances::default()).unwrap();
        let v = Matrix::from_columns(&eig.right_vectors).unwrap();
        let lam = Matrix::from_diagonal(&eig.eigenvalues);
        prop_assert!(a.distance(&(&(&v * &lam) * &v.dagger())) < 1e-11 * (1.0 + a.norm_fro()));
        prop_assert!((&v.dagger() * &v).distance(&Matrix::identity(n)) < 1e-11);
    }

    #[test]
    fn positive_square_root(seed in any::<u64>(), n in 1usize..=8) {
        let a = Ensemble::new(seed).positive_definite::<f64>(n, 0.1);
        let b = sqrt_psd(&a, &Tolerances::default()).unwrap();
        prop_assert!((&b * &b).distance(&a) <= 1e-11 * a.norm_fro());
        prop_assert!((&b * &a).distance(&(&a * &b)) <= 1e-11 * a.norm_fro());
        prop_assert!(b.hermitian_residual() < 1e-12);
    }

    #[test]
    fn series_exponential_inverse(seed in any::<u64>(), n in 1usize..=6, scale in 0.1f64..20.0) {
        let m = Ensemble::new(seed).unit_matrix::<f64>(n).scale_real(scale);
        let p = expm_series(&m).unwrap();
        let q = expm_series(&m.scale_real(-1.0)).unwrap();
        // products of large, nearly cancelling factors: relative to their size
        let size = (p.norm_fro() * q.norm_fro()).max(1.0);
        prop_assert!((&p * &q).distance(&Matrix::identity(n)) < 1e-10 * size);
    }

    #[test]
    fn spectral_and_series_propagators_agree(seed in any::<u64>(), n in 2usize..=6, r in 0.1f64..20.0) {
        let sys = system(seed, n);
        let t = r / sys.h().norm_fro();
        for gen in GeneratorKind::ALL {
            let series = propagator_series(&sys, gen, Complex::new(t, 0.0)).unwrap();
            prop_assert!(relative_distance(&propagator_at(&sys, gen, t), &series) < 1e-9);
        }
    }
}

#[test]
fn single_precision_builds_and_conserves() {
    let h = Matrix32::from_real_rows(&[vec![0.0, -0.5], vec![-1.5, 0.0]]).unwrap();
    let tol = Tolerances {
        eig_tol: 1e-5,
        herm_tol: 1e-5,
        bi_tol: 1e-4,
        real_tol: 1e-4,
        psd_floor: 1e-6,
        ..Tolerances::default()
    };
    let sys = BiorthogonalSystem::build(&h, NormalizationPolicy::Sds, &tol).unwrap();
    assert!(sys.spectrum().is_real());
    assert!(sys.diagnostics().biorthonormality < 1e-5);
    let f = &sys.phi()[0] + &sys.phi()[1];
    let grid = TimeGrid::linspace(0.0f32, 5.0, 20).unwrap();
    let trace = evolve_state(&sys, GeneratorKind::H, &f, &grid).unwrap();
    assert!(trace.norm_variation(MetricKind::Psi) < 1e-4);
}
