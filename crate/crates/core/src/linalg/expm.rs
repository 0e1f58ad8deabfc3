use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

const MAX_TERMS: usize = 60;
/// Largest `‖A‖₁` accepted before the result is considered an overflow.
const MAX_NORM: f64 = 700.0;

/// `e^A` by scaling and squaring around a truncated Taylor series.
///
/// This is the brute-force reference used to cross-check spectral
/// propagators; it never looks at eigenvalues.
pub fn expm_series<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.dim();
    let norm = a.norm_one();
    if norm.to_f64_lossy() > MAX_NORM {
        return Err(Error::Overflow {
            norm: norm.to_f64_lossy(),
        });
    }
    // Scale so that ‖A / 2^s‖₁ ≤ 1/2.
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm > T::lit(0.5) {
        scaled_norm = scaled_norm / T::lit(2.0);
        squarings += 1;
    }
    let b = a.scale_real(T::lit(0.5).powi(squarings as i32));

    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=MAX_TERMS {
        term = (&term * &b).scale(cr(T::one() / T::from_usize(k).unwrap()));
        sum += &term;
        if term.norm_fro() <= T::epsilon() * sum.norm_fro() * T::lit(0.01) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if !sum.is_finite() {
        return Err(Error::Overflow {
            norm: norm.to_f64_lossy(),
        });
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn zero_matrix_gives_identity() {
        let z = ComplexMatrix::<f64>::zeros(3);
        assert_eq!(expm_series(&z).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn pauli_x_rotation_by_pi_is_minus_identity() {
        // e^{-iπσx} = cos π · I - i sin π · σx = -I
        let pi = std::f64::consts::PI;
        let a = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(0.0, -pi)],
            vec![c(0.0, -pi), c(0.0, 0.0)],
        ])
        .unwrap();
        let e = expm_series(&a).unwrap();
        assert!(e.distance(&ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-12);
    }

    #[test]
    fn scalar_exponential() {
        let a = ComplexMatrix::<f64>::from_real_diagonal(&[1.0, -2.0]);
        let e = expm_series(&a).unwrap();
        assert!((e[(0, 0)].re - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)].re - (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn overflow_and_non_finite() {
        let big = ComplexMatrix::<f64>::from_real_diagonal(&[1e4, 0.0]);
        assert!(matches!(expm_series(&big), Err(Error::Overflow { .. })));
        let nan = ComplexMatrix::<f64>::from_real_diagonal(&[f64::NAN]);
        assert_eq!(expm_series(&nan), Err(Error::NonFinite));
    }
}
