//! Transition probabilities under the three candidate laws, the Hermitian
//! baseline, closed-form special cases, and discrimination reports.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::biortho::{BiorthogonalSystem, Quality};
use crate::dynamics::{evolve_states, GeneratorKind, SpectralExpansion, BasisKind, TimeGrid};
use crate::error::{Error, Result};
use crate::linalg::{check_dims, ComplexVector};
use crate::metric::{self, MetricKind};
use crate::scalar::{cr, Real};

/// Normalised squared overlap `|<f, g>_m|² / (‖f‖²_m ‖g‖²_m)` in one of the
/// three geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProbabilityLaw {
    #[serde(rename = "standard")]
    Standard,
    #[serde(rename = "psi")]
    PsiLaw,
    #[serde(rename = "phi")]
    PhiLaw,
}

impl ProbabilityLaw {
    pub const ALL: [ProbabilityLaw; 3] = [
        ProbabilityLaw::Standard,
        ProbabilityLaw::PsiLaw,
        ProbabilityLaw::PhiLaw,
    ];

    pub fn metric(self) -> MetricKind {
        match self {
            ProbabilityLaw::Standard => MetricKind::Standard,
            ProbabilityLaw::PsiLaw => MetricKind::Psi,
            ProbabilityLaw::PhiLaw => MetricKind::Phi,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProbabilityLaw::Standard => "standard",
            ProbabilityLaw::PsiLaw => "psi",
            ProbabilityLaw::PhiLaw => "phi",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.name() == s)
    }
}

/// Transition probability from the state `current` to `target`.
pub fn probability<T: Real>(
    sys: &BiorthogonalSystem<T>,
    law: ProbabilityLaw,
    target: &ComplexVector<T>,
    current: &ComplexVector<T>,
) -> Result<T> {
    let kind = law.metric();
    let tol = sys.tolerances();
    let nf = metric::norm_sqr(sys, kind, target)?;
    let nt = metric::norm_sqr(sys, kind, current)?;
    let zero = T::lit(tol.zero_tol);
    if nf.sqrt() <= zero || nt.sqrt() <= zero {
        return Err(Error::ZeroVector);
    }
    let overlap = metric::inner(sys, kind, target, current)?;
    clamp_probability(overlap.norm_sqr() / (nf * nt), tol.range_tol)
}

/// Snaps values within `slack` of `[0, 1]` onto the interval; anything
/// further out is a bug and is reported.
fn clamp_probability<T: Real>(p: T, slack: f64) -> Result<T> {
    let slack = T::lit(slack);
    if !(p >= -slack && p <= T::one() + slack) {
        return Err(Error::RangeViolation {
            value: p.to_f64_lossy(),
        });
    }
    Ok(p.max(T::zero()).min(T::one()))
}

/// Probability series for several laws along one evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTrace<T> {
    pub generator: GeneratorKind,
    pub times: Vec<T>,
    pub laws: Vec<ProbabilityLaw>,
    /// `values[i]` is the series for `laws[i]`.
    pub values: Vec<Vec<T>>,
    pub initial: ComplexVector<T>,
    pub target: ComplexVector<T>,
}

impl<T: Real> TransitionTrace<T> {
    pub fn series(&self, law: ProbabilityLaw) -> Option<&[T]> {
        self.laws
            .iter()
            .position(|l| *l == law)
            .map(|i| self.values[i].as_slice())
    }
}

/// Evolves `initial` under `gen` and evaluates every requested law against
/// `target` at each grid time.
pub fn transition_trace<T: Real>(
    sys: &BiorthogonalSystem<T>,
    laws: &[ProbabilityLaw],
    initial: &ComplexVector<T>,
    target: &ComplexVector<T>,
    gen: GeneratorKind,
    grid: &TimeGrid<T>,
) -> Result<TransitionTrace<T>> {
    check_dims(sys.dim(), initial.dim())?;
    check_dims(sys.dim(), target.dim())?;
    let states = evolve_states(sys, gen, initial, grid.times());
    let values = laws
        .iter()
        .map(|&law| {
            states
                .iter()
                .map(|s| probability(sys, law, target, s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransitionTrace {
        generator: gen,
        times: grid.times().to_vec(),
        laws: laws.to_vec(),
        values,
        initial: initial.clone(),
        target: target.clone(),
    })
}

/// Standard transition probability under the Hermitian `H0`, together with
/// the coefficients `d_k = <e_k, Φ0>` and `p_k = <e_k, Φf>`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineTrace<T> {
    pub trace: TransitionTrace<T>,
    pub initial_expansion: SpectralExpansion<T>,
    pub target_expansion: SpectralExpansion<T>,
}

/// `|Σ_k d_k conj(p_k) e^{-iE_k t}|² / (‖Φf‖² ‖Φ0‖²)`.
pub fn hermitian_baseline<T: Real>(
    sys: &BiorthogonalSystem<T>,
    initial: &ComplexVector<T>,
    target: &ComplexVector<T>,
    grid: &TimeGrid<T>,
) -> Result<BaselineTrace<T>> {
    require_real(sys)?;
    let d = SpectralExpansion::expand(sys, BasisKind::E, initial)?;
    let p = SpectralExpansion::expand(sys, BasisKind::E, target)?;
    let denom = initial.norm_sqr() * target.norm_sqr();
    let zero = T::lit(sys.tolerances().zero_tol);
    if denom.sqrt() <= zero * zero {
        return Err(Error::ZeroVector);
    }
    let energies: Vec<T> = sys.eigenvalues().iter().map(|z| z.re).collect();
    let values = grid
        .times()
        .iter()
        .map(|&t| {
            let amp = d
                .coefficients
                .iter()
                .zip(&p.coefficients)
                .zip(&energies)
                .fold(cr::<T>(T::zero()), |acc, ((dk, pk), e)| {
                    acc + dk * pk.conj() * Complex::from_polar(T::one(), -*e * t)
                });
            clamp_probability(amp.norm_sqr() / denom, sys.tolerances().range_tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BaselineTrace {
        trace: TransitionTrace {
            generator: GeneratorKind::H0,
            times: grid.times().to_vec(),
            laws: vec![ProbabilityLaw::Standard],
            values: vec![values],
            initial: initial.clone(),
            target: target.clone(),
        },
        initial_expansion: d,
        target_expansion: p,
    })
}

fn require_real<T: Real>(sys: &BiorthogonalSystem<T>) -> Result<()> {
    let s = sys.spectrum();
    if s.is_real() {
        Ok(())
    } else {
        Err(Error::NotRealSpectrum {
            max_imag: s.max_imag.to_f64_lossy(),
        })
    }
}

/// Which family the final state of a special case is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FinalFamily {
    Phi,
    Psi,
}

/// Initial state `φ_a + φ_b` (`a != b`), final state `φ_j` or `Ψ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialCase {
    pub family: FinalFamily,
    pub j: usize,
    pub a: usize,
    pub b: usize,
}

impl SpecialCase {
    pub fn initial<T: Real>(&self, sys: &BiorthogonalSystem<T>) -> ComplexVector<T> {
        &sys.phi()[self.a] + &sys.phi()[self.b]
    }

    pub fn target<T: Real>(&self, sys: &BiorthogonalSystem<T>) -> ComplexVector<T> {
        match self.family {
            FinalFamily::Phi => sys.phi()[self.j].clone(),
            FinalFamily::Psi => sys.psi()[self.j].clone(),
        }
    }
}

/// Closed-form values `[Standard, PsiLaw, PhiLaw]` for the two-term initial
/// state, built only from inner products of basis vectors and
/// `e^{i(E_a - E_b)t}`. Needs a real spectrum.
pub fn special_case_oracle<T: Real>(
    sys: &BiorthogonalSystem<T>,
    case: SpecialCase,
    t: T,
) -> Result<[T; 3]> {
    require_real(sys)?;
    let n = sys.dim();
    for index in [case.j, case.a, case.b] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, dim: n });
        }
    }
    if case.a == case.b {
        return Err(Error::ParameterOutOfRange {
            name: "b",
            value: case.b as f64,
            reason: "initial state needs two distinct indices",
        });
    }
    let (j, a, b) = (case.j, case.a, case.b);
    let phi = sys.phi();
    let psi = sys.psi();
    let e = sys.eigenvalues();
    let phase = Complex::from_polar(T::one(), (e[a].re - e[b].re) * t);
    let delta = |x: usize, y: usize| if x == y { T::one() } else { T::zero() };
    let std = |f: &ComplexVector<T>, g: &ComplexVector<T>| f.dot(g);
    let in_phi = |f: &ComplexVector<T>, g: &ComplexVector<T>| {
        metric::inner(sys, MetricKind::Phi, f, g).expect("dimensions checked")
    };
    let in_psi = |f: &ComplexVector<T>, g: &ComplexVector<T>| {
        metric::inner(sys, MetricKind::Psi, f, g).expect("dimensions checked")
    };
    let two = T::lit(2.0);
    // |x_a|² + |x_b|² + (e^{i(Ea-Eb)t} conj(x_a) x_b + c.c.) with x_m = <f_j, f_m>.
    let numerator = |ip: &InnerProduct<T>, basis: &[ComplexVector<T>]| {
        let xa = ip(&basis[j], &basis[a]);
        let xb = ip(&basis[j], &basis[b]);
        xa.norm_sqr() + xb.norm_sqr() + two * (phase * ip(&basis[a], &basis[j]) * xb).re
    };
    // ‖φ_a‖² + ‖φ_b‖² + (e^{i(Ea-Eb)t} <φ_a, φ_b> + c.c.)
    let evolved_norm = |ip: &InnerProduct<T>| {
        ip(&phi[a], &phi[a]).re + ip(&phi[b], &phi[b]).re + two * (phase * ip(&phi[a], &phi[b])).re
    };
    let pair_sum = delta(j, a) + delta(j, b);
    let values = match case.family {
        FinalFamily::Phi => {
            let psi_law = pair_sum / two;
            let standard =
                numerator(&std, phi) / (std(&phi[j], &phi[j]).re * evolved_norm(&std));
            let phi_law =
                numerator(&in_phi, phi) / (in_phi(&phi[j], &phi[j]).re * evolved_norm(&in_phi));
            [standard, psi_law, phi_law]
        }
        FinalFamily::Psi => {
            let standard = pair_sum / (std(&psi[j], &psi[j]).re * evolved_norm(&std));
            let psi_law = numerator(&std, psi) / (two * in_psi(&psi[j], &psi[j]).re);
            let phi_law = numerator(&std, phi) / evolved_norm(&in_phi);
            [standard, psi_law, phi_law]
        }
    };
    Ok(values)
}

type InnerProduct<'a, T> = dyn Fn(&ComplexVector<T>, &ComplexVector<T>) -> Complex<T> + 'a;

/// One experiment: prepare `initial`, evolve under `generator`, ask for `target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub name: String,
    pub initial: ComplexVector<T>,
    pub target: ComplexVector<T>,
    pub generator: GeneratorKind,
    pub grid: TimeGrid<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairComparison<T> {
    pub first: ProbabilityLaw,
    pub second: ProbabilityLaw,
    /// `max_t |P_first(t) - P_second(t)|`
    pub max_difference: T,
    pub distinguishable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport<T> {
    pub name: String,
    pub trace: TransitionTrace<T>,
    pub comparisons: Vec<PairComparison<T>>,
}

impl<T: Real> ScenarioReport<T> {
    pub fn comparison(&self, a: ProbabilityLaw, b: ProbabilityLaw) -> Option<&PairComparison<T>> {
        self.comparisons
            .iter()
            .find(|c| (c.first == a && c.second == b) || (c.first == b && c.second == a))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationReport<T> {
    pub threshold: T,
    pub scenarios: Vec<ScenarioReport<T>>,
    pub warnings: Vec<String>,
}

/// Warnings attached to any result computed from this system.
pub fn system_warnings<T: Real>(sys: &BiorthogonalSystem<T>) -> Vec<String> {
    let mut w = Vec::new();
    let s = sys.spectrum();
    if !s.is_real() {
        w.push(format!(
            "nonconservative: spectrum has complex eigenvalues (max |Im E| = {:e}); no geometry preserves probability",
            s.max_imag.to_f64_lossy()
        ));
    }
    if sys.quality() == Quality::IllConditioned {
        w.push(format!(
            "ill-conditioned: cond(S_phi) = {:e} exceeds {:e}",
            sys.condition().to_f64_lossy(),
            sys.tolerances().cond_limit
        ));
    }
    w
}

pub fn evaluate_scenario<T: Real>(
    sys: &BiorthogonalSystem<T>,
    scenario: &Scenario<T>,
) -> Result<ScenarioReport<T>> {
    let laws = ProbabilityLaw::ALL;
    let trace = transition_trace(
        sys,
        &laws,
        &scenario.initial,
        &scenario.target,
        scenario.generator,
        &scenario.grid,
    )?;
    let threshold = T::lit(sys.tolerances().discrim_threshold);
    let mut comparisons = Vec::new();
    for i in 0..laws.len() {
        for k in i + 1..laws.len() {
            let max_difference = trace.values[i]
                .iter()
                .zip(&trace.values[k])
                .map(|(x, y)| (*x - *y).abs())
                .fold(T::zero(), T::max);
            comparisons.push(PairComparison {
                first: laws[i],
                second: laws[k],
                max_difference,
                distinguishable: max_difference > threshold,
            });
        }
    }
    Ok(ScenarioReport {
        name: scenario.name.clone(),
        trace,
        comparisons,
    })
}

/// Evaluates all three laws on every scenario and marks which law pairs an
/// experiment could tell apart.
pub fn discrimination_report<T: Real>(
    sys: &BiorthogonalSystem<T>,
    scenarios: &[Scenario<T>],
) -> Result<DiscriminationReport<T>> {
    let reports = scenarios
        .iter()
        .map(|s| evaluate_scenario(sys, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscriminationReport {
        threshold: T::lit(sys.tolerances().discrim_threshold),
        scenarios: reports,
        warnings: system_warnings(sys),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biortho::NormalizationPolicy;
    use crate::linalg::ComplexMatrix;
    use crate::scalar::c;
    use crate::Tolerances;

    fn sys2(k: f64) -> BiorthogonalSystem<f64> {
        let h = ComplexMatrix::from_real_rows(&[vec![0.0, -(1.0 - k)], vec![-(1.0 + k), 0.0]])
            .unwrap();
        BiorthogonalSystem::build(&h, NormalizationPolicy::Sds, &Tolerances::default()).unwrap()
    }

    #[test]
    fn self_overlap_is_one() {
        let sys = sys2(0.4);
        let v = ComplexVector::from_vec(vec![c(0.2, 1.0), c(-0.7, 0.1)]);
        for law in ProbabilityLaw::ALL {
            assert!((probability(&sys, law, &v, &v).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_vector_is_an_error() {
        let sys = sys2(0.4);
        let z = ComplexVector::zeros(2);
        let v = ComplexVector::basis(2, 0);
        assert_eq!(
            probability(&sys, ProbabilityLaw::Standard, &z, &v),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn clamping_only_near_the_boundary() {
        assert_eq!(clamp_probability(1.0 + 1e-15, 1e-12).unwrap(), 1.0);
        assert_eq!(clamp_probability(-1e-15, 1e-12).unwrap(), 0.0);
        assert!(matches!(
            clamp_probability(1.0 + 1e-9, 1e-12),
            Err(Error::RangeViolation { .. })
        ));
        assert!(matches!(
            clamp_probability(f64::NAN, 1e-12),
            Err(Error::RangeViolation { .. })
        ));
    }

    #[test]
    fn oracle_rejects_bad_indices() {
        let sys = sys2(0.4);
        let case = SpecialCase { family: FinalFamily::Phi, j: 2, a: 0, b: 1 };
        assert!(matches!(
            special_case_oracle(&sys, case, 0.0),
            Err(Error::IndexOutOfRange { index: 2, dim: 2 })
        ));
        let case = SpecialCase { family: FinalFamily::Phi, j: 0, a: 1, b: 1 };
        assert!(special_case_oracle(&sys, case, 0.0).is_err());
    }

    #[test]
    fn oracle_matches_trace_on_two_level_system() {
        let sys = sys2(0.5);
        let grid = TimeGrid::linspace(0.0, 5.0, 50).unwrap();
        for family in [FinalFamily::Phi, FinalFamily::Psi] {
            for j in 0..2 {
                let case = SpecialCase { family, j, a: 0, b: 1 };
                let tr = transition_trace(
                    &sys,
                    &ProbabilityLaw::ALL,
                    &case.initial(&sys),
                    &case.target(&sys),
                    GeneratorKind::H,
                    &grid,
                )
                .unwrap();
                for (i, &t) in grid.times().iter().enumerate() {
                    let o = special_case_oracle(&sys, case, t).unwrap();
                    for (l, want) in o.iter().enumerate() {
                        assert!((tr.values[l][i] - want).abs() < 1e-10, "{family:?} j={j} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn baseline_for_eigenvector_is_constant_one() {
        let sys = sys2(0.3);
        let grid = TimeGrid::linspace(0.0, 3.0, 20).unwrap();
        let e1 = sys.e()[1].clone();
        let b = hermitian_baseline(&sys, &e1, &e1, &grid).unwrap();
        for v in &b.trace.values[0] {
            assert!((v - 1.0).abs() < 1e-13);
        }
        let nonzero = b.initial_expansion.coefficients.iter().filter(|z| z.norm() > 1e-12).count();
        assert_eq!(nonzero, 1);
    }
}
