//! Dense complex linear algebra kernel.

mod eigen;
mod expm;
mod lu;
mod matrix;

pub use eigen::{
    canonical_order, condition_number, eigen_general, eigen_hermitian, hessenberg, inv_sqrt_psd,
    schur, spectral_norm, sqrt_psd, EigenDecomposition,
};
pub use expm::expm_series;
pub use lu::{inverse, solve, Lu};
pub use matrix::{ComplexMatrix, ComplexVector};
pub(crate) use matrix::check_dims;
