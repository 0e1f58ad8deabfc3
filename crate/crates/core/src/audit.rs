//! Invariant audit: every structural property of a built system, each as a
//! residual compared against its tolerance.

use crate::biortho::BiorthogonalSystem;
use crate::dynamics::{
    evolve_state, heisenberg, propagator_at, propagator_deviation, automorphism_defect,
    GeneratorKind, Picture, TimeGrid,
};
use crate::ensemble::Ensemble;
use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::metric::{self, MetricKind};
use crate::thermal::{build_thermal, kms_residual, kms_tolerance};
use crate::transition::{probability, system_warnings, ProbabilityLaw};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Check<T> {
    pub name: String,
    pub residual: T,
    pub tolerance: T,
    pub pass: bool,
}

impl<T: Real> Check<T> {
    /// Passes iff `residual <= tolerance`; NaN fails.
    pub fn new(name: impl Into<String>, residual: T, tolerance: T) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }

    /// Passes iff `residual > threshold`: the property is expected to fail.
    pub fn exceeds(name: impl Into<String>, residual: T, threshold: T) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance: threshold,
            pass: residual > threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport<T> {
    pub checks: Vec<Check<T>>,
    pub warnings: Vec<String>,
}

impl<T: Real> AuditReport<T> {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check<T>> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check<T>> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `‖a - b‖ / max(1, ‖a‖, ‖b‖)`.
pub fn relative_distance<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    a.distance(b) / T::one().max(a.norm_fro()).max(b.norm_fro())
}

/// Runs the full property suite on `sys`. Random probes are drawn from
/// `seed`, so the report is reproducible.
pub fn audit_system<T: Real>(sys: &BiorthogonalSystem<T>, seed: u64) -> Result<AuditReport<T>> {
    let tol = *sys.tolerances();
    let n = sys.dim();
    let real = sys.spectrum().is_real();
    let mut rng = Ensemble::new(seed);
    let mut checks = Vec::new();

    // Structure. Residuals are absolute; scale by the metric size so that
    // legitimately large vectors are not penalised.
    let metric_scale = sys.s_phi().norm_fro().max(sys.s_psi().norm_fro()).max(T::one());
    let h_scale = sys.h().norm_fro().max(T::one());
    let bi = T::lit(tol.bi_tol);
    let diag = sys.diagnostics();
    for (name, residual, real_only) in diag.entries() {
        let scale = match name {
            "eigen_residual" | "adjoint_eigen_residual" | "intertwining_psi"
            | "intertwining_phi" => h_scale * metric_scale,
            "h0_eigen_residual" | "h0_hermitian" | "h0_similarity_forms" => h_scale,
            _ => metric_scale,
        };
        if real_only && !real {
            if matches!(name, "intertwining_psi" | "h0_hermitian")
                && sys.spectrum().max_imag > T::lit(10.0 * tol.real_tol)
            {
                checks.push(Check::exceeds(format!("structure.{name}_broken"), residual, bi));
            }
            continue;
        }
        checks.push(Check::new(format!("structure.{name}"), residual / scale, bi));
    }

    // Adjoint calculus on random probes.
    let x = rng.unit_matrix::<T>(n);
    let y = rng.unit_matrix::<T>(n);
    let f = rng.unit_vector::<T>(n);
    let g = rng.unit_vector::<T>(n);
    let sa = T::lit(tol.sa_tol);
    for kind in MetricKind::ALL {
        let ax = metric::adjoint(sys, kind, &x)?;
        let involution = relative_distance(&metric::adjoint(sys, kind, &ax)?, &x);
        checks.push(Check::new(format!("adjoint.{}.involution", kind.name()), involution, sa));
        let lhs = metric::adjoint(sys, kind, &(&x * &y))?;
        let rhs = &metric::adjoint(sys, kind, &y)? * &ax;
        checks.push(Check::new(
            format!("adjoint.{}.anti_homomorphism", kind.name()),
            relative_distance(&lhs, &rhs),
            sa,
        ));
        let l = metric::inner(sys, kind, &x.matvec(&f), &g)?;
        let r = metric::inner(sys, kind, &f, &ax.matvec(&g))?;
        let size = T::one().max(l.norm()).max(r.norm()).max(
            metric::norm(sys, kind, &f)? * metric::norm(sys, kind, &g)? * metric_scale,
        );
        checks.push(Check::new(
            format!("adjoint.{}.compatibility", kind.name()),
            (l - r).norm() / size,
            sa,
        ));
    }
    let flat = metric::adjoint(sys, MetricKind::Phi, &x)?;
    let sharp = metric::adjoint(sys, MetricKind::Psi, &x)?;
    let s_psi2 = sys.s_psi() * sys.s_psi();
    let s_phi2 = sys.s_phi() * sys.s_phi();
    checks.push(Check::new(
        "adjoint.bridge",
        relative_distance(&flat, &(&(&s_psi2 * &sharp) * &s_phi2)),
        sa,
    ));
    if real {
        let h_sharp = metric::adjoint(sys, MetricKind::Psi, sys.h())?;
        checks.push(Check::new("adjoint.h_sharp_selfadjoint", relative_distance(&h_sharp, sys.h()), sa));
        let hd_flat = metric::adjoint(sys, MetricKind::Phi, sys.h_dagger())?;
        checks.push(Check::new(
            "adjoint.hdagger_flat_selfadjoint",
            relative_distance(&hd_flat, sys.h_dagger()),
            sa,
        ));
    }
    let half = metric::inner_half_form(sys, MetricKind::Phi, &f, &g)?;
    let full = metric::inner(sys, MetricKind::Phi, &f, &g)?;
    checks.push(Check::new(
        "metric.half_form_equivalence",
        (half - full).norm() / metric_scale,
        sa,
    ));

    // Propagators: time chosen so that ‖G t‖ stays moderate.
    let xval = T::lit(tol.xval_tol);
    let t = T::lit(0.7) / h_scale.max(T::one()) * T::lit(3.0);
    let s = T::lit(0.45) / h_scale.max(T::one()) * T::lit(3.0);
    for gen in GeneratorKind::ALL {
        let deviation = propagator_deviation(sys, gen, t)?;
        let scale = propagator_at(sys, gen, t).norm_fro().max(T::one());
        checks.push(Check::new(
            format!("propagator.{}.series_oracle", gen.name()),
            deviation / scale,
            xval,
        ));
        let lhs = propagator_at(sys, gen, t + s);
        let rhs = &propagator_at(sys, gen, t) * &propagator_at(sys, gen, s);
        checks.push(Check::new(
            format!("propagator.{}.group_law", gen.name()),
            relative_distance(&lhs, &rhs),
            xval,
        ));
    }

    // Conservation along each generator.
    let grid = TimeGrid::linspace(T::zero(), T::lit(5.0), 50)?;
    let phi0 = rng.unit_vector::<T>(n);
    if real {
        for gen in GeneratorKind::ALL {
            let trace = evolve_state(sys, gen, &phi0, &grid)?;
            let kind = gen.conserved_metric();
            let first = trace.norms(kind)[0].max(T::min_positive_value());
            checks.push(Check::new(
                format!("dynamics.{}.conserves_{}", gen.name(), kind.name()),
                trace.norm_variation(kind) / first,
                T::lit(1e-10) * metric_scale,
            ));
        }
    }

    // Heisenberg pictures.
    for picture in [Picture::Psi, Picture::Phi, Picture::Partner] {
        let defect = automorphism_defect(sys, picture, &x, &y, t)?;
        let scale = heisenberg(sys, picture, &(&x * &y), t)?.norm_fro().max(T::one());
        checks.push(Check::new(
            format!("heisenberg.{}.automorphism", picture.name()),
            defect / scale,
            T::lit(1e-10) * metric_scale,
        ));
    }

    // Thermal.
    let kms_tol = kms_tolerance(sys);
    for gen in GeneratorKind::ALL {
        let state = build_thermal(sys, gen, T::one())?;
        let one = state.expectation(&ComplexMatrix::identity(n))?;
        checks.push(Check::new(
            format!("thermal.{}.normalization", gen.name()),
            (one - crate::scalar::cone()).norm(),
            T::lit(1e-12),
        ));
        if real {
            checks.push(Check::new(
                format!("thermal.{}.kms", gen.name()),
                kms_residual(sys, gen, &x, &y, T::lit(0.3), T::one())?,
                kms_tol,
            ));
        }
    }

    // Probability range on random states.
    let mut worst = T::zero();
    for _ in 0..4 {
        let a = rng.vector::<T>(n);
        let b = rng.vector::<T>(n);
        for law in ProbabilityLaw::ALL {
            let p = probability(sys, law, &a, &b)?;
            worst = worst.max(-p).max(p - T::one());
        }
    }
    checks.push(Check::new("transition.range", worst.max(T::zero()), T::lit(tol.range_tol)));

    Ok(AuditReport {
        checks,
        warnings: system_warnings(sys),
    })
}
