use thiserror::Error;

/// Every failure mode of the numeric core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("spectrum is degenerate: minimal eigenvalue gap {gap:e} below threshold {threshold:e}")]
    DegenerateSpectrum { gap: f64, threshold: f64 },
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e}, floor {floor:e})")]
    NotPositive { min_eigenvalue: f64, floor: f64 },
    #[error("matrix exponential overflow (norm {norm:e})")]
    Overflow { norm: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("dimension {dim} exceeds configured maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("input contains non-finite entries")]
    NonFinite,
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is singular (pivot {pivot})")]
    Singular { pivot: usize },
    #[error("adjoint eigenvector pairing is ambiguous for eigenvalue index {index}")]
    PairingAmbiguous { index: usize },
    #[error("no adjoint eigenvector matches eigenvalue index {index} (distance {distance:e})")]
    PairingFailed { index: usize, distance: f64 },
    #[error("metric operator is ill-conditioned: cond {condition:e} exceeds {limit:e}")]
    IllConditioned { condition: f64, limit: f64 },
    #[error("squared norm {value:e} is negative or complex: metric lost positivity")]
    NegativeNorm { value: f64 },
    #[error("vector has zero norm in the requested geometry")]
    ZeroVector,
    #[error("probability {value} lies outside [0, 1]")]
    RangeViolation { value: f64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("operation requires a real spectrum (max |Im E| = {max_imag:e})")]
    NotRealSpectrum { max_imag: f64 },
    #[error("operators are not pseudo-fermionic (anticommutator residual {residual:e})")]
    NotPseudoFermionic { residual: f64 },
    #[error("kernel of {operator} is not one-dimensional")]
    KernelNotOneDimensional { operator: &'static str },
    #[error("parameter {name} = {value} out of range: {reason}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// Stable machine-readable identifier used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NonConvergence",
            Error::DegenerateSpectrum { .. } => "DegenerateSpectrum",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPositive { .. } => "NotPositive",
            Error::Overflow { .. } => "Overflow",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::NonFinite => "NonFinite",
            Error::Empty => "Empty",
            Error::Singular { .. } => "Singular",
            Error::PairingAmbiguous { .. } => "PairingAmbiguous",
            Error::PairingFailed { .. } => "PairingFailed",
            Error::IllConditioned { .. } => "IllConditioned",
            Error::NegativeNorm { .. } => "NegativeNorm",
            Error::ZeroVector => "ZeroVector",
            Error::RangeViolation { .. } => "RangeViolation",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NotRealSpectrum { .. } => "NotRealSpectrum",
            Error::NotPseudoFermionic { .. } => "NotPseudoFermionic",
            Error::KernelNotOneDimensional { .. } => "KernelNotOneDimensional",
            Error::ParameterOutOfRange { .. } => "ParameterOutOfRange",
            Error::InvalidGrid(_) => "InvalidGrid",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
