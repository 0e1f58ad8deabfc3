//! Finite-dimensional non-self-adjoint Hamiltonians: biorthogonal
//! eigenbases, metric operators, the three inner products with their
//! adjoints, generated dynamics, transition probabilities, Gibbs states, and
//! two-level pseudo-fermions.
//!
//! Everything is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix it to `f64`.
//!
//! ```
//! use nhqdyn::{Matrix, NormalizationPolicy, System, Tolerances};
//!
//! let h = Matrix::from_real_rows(&[vec![0.0, -0.5], vec![-1.5, 0.0]]).unwrap();
//! let sys = System::build(&h, NormalizationPolicy::UnitPhi, &Tolerances::default()).unwrap();
//! assert!(sys.spectrum().is_real());
//! assert!(sys.diagnostics().biorthonormality < 1e-12);
//! ```

// `!(x > y)` is used deliberately so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod biortho;
pub mod config;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod metric;
pub mod pseudofermion;
mod scalar;
pub mod thermal;
pub mod transition;

pub use audit::{audit_system, AuditReport, Check};
pub use biortho::{
    classify_spectrum, BiorthogonalSystem, NormalizationPolicy, Quality, SpectrumClass,
    SpectrumKind, StructureDiagnostics,
};
pub use config::Tolerances;
pub use dynamics::{
    evolve_state, heisenberg, propagator, BasisKind, EvolutionTrace, GeneratorKind, Picture,
    SpectralExpansion, TimeGrid,
};
pub use ensemble::Ensemble;
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, EigenDecomposition};
pub use metric::MetricKind;
pub use pseudofermion::{build_pf, build_sds, PfNormalization, PseudoFermionAlgebra, SdsModel};
pub use scalar::Real;
pub use thermal::{build_thermal, kms_residual, ThermalState};
pub use transition::{
    probability, transition_trace, DiscriminationReport, ProbabilityLaw, Scenario, TransitionTrace,
};

pub use num_complex::Complex;

pub type Matrix = ComplexMatrix<f64>;
pub type Vector = ComplexVector<f64>;
pub type System = BiorthogonalSystem<f64>;
pub type Sds = SdsModel<f64>;
pub type Algebra = PseudoFermionAlgebra<f64>;
pub type Matrix32 = ComplexMatrix<f32>;
pub type Vector32 = ComplexVector<f32>;
