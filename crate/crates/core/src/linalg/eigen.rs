//! Eigendecompositions of small dense complex matrices.
//!
//! General matrices go through Householder reduction to Hessenberg form,
//! then single-shift complex QR to a Schur form `A = Q T Q†`. Eigenvectors
//! come from back-substitution on the triangular factor. Hermitian matrices
//! use cyclic Jacobi rotations, which keep eigenvectors orthonormal to
//! working precision.

use std::cmp::Ordering;

use num_complex::Complex;

use super::matrix::{ComplexMatrix, ComplexVector};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::scalar::{cone, cr, czero, Real};

const MAX_QR_ITERATIONS_PER_EIGENVALUE: usize = 60;
const MAX_JACOBI_SWEEPS: usize = 100;

/// Right eigenpairs with residual diagnostics, in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T> {
    pub eigenvalues: Vec<Complex<T>>,
    pub right_vectors: Vec<ComplexVector<T>>,
    /// `‖A v - λ v‖` for each unit-norm pair.
    pub residuals: Vec<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_residual(&self) -> T {
        self.residuals.iter().copied().fold(T::zero(), T::max)
    }

    /// Smallest pairwise distance between eigenvalues (infinite for dim 1).
    pub fn min_gap(&self) -> T {
        min_pairwise_gap(&self.eigenvalues)
    }
}

pub(crate) fn min_pairwise_gap<T: Real>(values: &[Complex<T>]) -> T {
    let mut gap = T::infinity();
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            gap = gap.min((values[i] - values[j]).norm());
        }
    }
    gap
}

/// Canonical eigenvalue order: ascending real part; real parts closer than
/// `tie` form a group that is ordered by imaginary part.
pub fn canonical_order<T: Real>(values: &[Complex<T>], tie: T) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[a]
            .re
            .partial_cmp(&values[b].re)
            .unwrap_or(Ordering::Equal)
    });
    let mut start = 0;
    while start < idx.len() {
        let anchor = values[idx[start]].re;
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]].re - anchor <= tie {
            end += 1;
        }
        idx[start..end].sort_by(|&a, &b| {
            values[a]
                .im
                .partial_cmp(&values[b].im)
                .unwrap_or(Ordering::Equal)
        });
        start = end;
    }
    idx
}

fn validate_input<T: Real>(a: &ComplexMatrix<T>, tol: &Tolerances) -> Result<()> {
    if a.dim() == 0 {
        return Err(Error::Empty);
    }
    if a.dim() > tol.max_dim {
        return Err(Error::DimensionTooLarge {
            dim: a.dim(),
            max: tol.max_dim,
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Right eigenpairs of a general complex matrix.
///
/// Fails with [`Error::DegenerateSpectrum`] when two eigenvalues are closer
/// than `gap_tol · ‖A‖`.
pub fn eigen_general<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerances,
) -> Result<EigenDecomposition<T>> {
    validate_input(a, tol)?;
    let n = a.dim();
    let norm = a.norm_fro();
    let (t, q) = schur(a)?;
    let values = t.diagonal();

    let threshold = T::lit(tol.gap_tol) * norm;
    let gap = min_pairwise_gap(&values);
    if n > 1 && !(gap >= threshold && gap > T::zero()) {
        return Err(Error::DegenerateSpectrum {
            gap: gap.to_f64_lossy(),
            threshold: threshold.to_f64_lossy(),
        });
    }

    let small = T::epsilon() * norm.max(T::min_positive_value());
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut x = vec![czero::<T>(); n];
        x[k] = cone();
        for i in (0..k).rev() {
            let mut s = czero::<T>();
            for j in i + 1..=k {
                s = s + t[(i, j)] * x[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < small {
                d = cr(small);
            }
            x[i] = -s / d;
        }
        let v = q.matvec(&ComplexVector::from_vec(x));
        vectors.push(v.normalized());
    }

    let order = canonical_order(&values, threshold);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut right_vectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for &k in &order {
        let v = &vectors[k];
        let r = (&a.matvec(v) - &v.scale(values[k])).norm();
        eigenvalues.push(values[k]);
        right_vectors.push(v.clone());
        residuals.push(r);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        right_vectors,
        residuals,
    })
}

/// Complex Schur form `A = Q T Q†` with `T` upper triangular.
pub fn schur<T: Real>(a: &ComplexMatrix<T>) -> Result<(ComplexMatrix<T>, ComplexMatrix<T>)> {
    let n = a.dim();
    let (mut h, mut q) = hessenberg(a);
    if n == 1 {
        return Ok((h, q));
    }
    let eps = T::epsilon();
    let norm = h.norm_fro();
    let max_iter = MAX_QR_ITERATIONS_PER_EIGENVALUE * n;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // Locate the start of the trailing unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let mut s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if s == T::zero() {
                s = norm;
            }
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = czero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::NonConvergence { iterations: total });
        }

        let shift = if iter.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + cr(T::lit(0.75) * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in lo..=hi {
            h[(i, i)] = h[(i, i)] - shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c.conj() * x + s.conj() * y;
                h[(k + 1, j)] = -s * x + c * y;
            }
            h[(k + 1, k)] = czero();
            rotations.push((k, c, s));
        }
        for &(k, c, s) in &rotations {
            let rmax = (k + 2).min(hi);
            for r in 0..=rmax {
                let x = h[(r, k)];
                let y = h[(r, k + 1)];
                h[(r, k)] = x * c + y * s;
                h[(r, k + 1)] = -x * s.conj() + y * c.conj();
            }
            for r in 0..n {
                let x = q[(r, k)];
                let y = q[(r, k + 1)];
                q[(r, k)] = x * c + y * s;
                q[(r, k + 1)] = -x * s.conj() + y * c.conj();
            }
        }
        for i in lo..=hi {
            h[(i, i)] = h[(i, i)] + shift;
        }
    }
    // Clean the strictly lower part.
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = czero();
        }
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok((h, q))
}

/// Rotation `G = [[conj c, conj s], [-s, c]]` with `G [x, y]ᵀ = [r, 0]ᵀ`.
fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (Complex<T>, Complex<T>) {
    let r = x.norm().hypot(y.norm());
    if r == T::zero() {
        return (cone(), czero());
    }
    (x / cr(r), y / cr(r))
}

/// Eigenvalue of the trailing 2×2 block closest to its bottom-right entry.
fn wilkinson_shift<T: Real>(
    a: Complex<T>,
    b: Complex<T>,
    c: Complex<T>,
    d: Complex<T>,
) -> Complex<T> {
    let half = cr(T::lit(0.5));
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let disc = (diff * diff + b * c).sqrt();
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Householder reduction `A = Q H Q†` with `H` upper Hessenberg.
pub fn hessenberg<T: Real>(a: &ComplexMatrix<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    for k in 0..n - 2 {
        let mut v: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() == T::zero() {
            cone()
        } else {
            x0 / cr(x0.norm())
        };
        let alpha = -phase * cr(xnorm);
        v[0] = v[0] - alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / cr(vnorm);
        }
        let two = cr(T::lit(2.0));
        // H <- P H with P = I - 2 v v† acting on rows k+1..n.
        for j in 0..n {
            let mut s = czero();
            for (idx, i) in (k + 1..n).enumerate() {
                s = s + v[idx].conj() * h[(i, j)];
            }
            for (idx, i) in (k + 1..n).enumerate() {
                h[(i, j)] = h[(i, j)] - two * v[idx] * s;
            }
        }
        // H <- H P and Q <- Q P on columns k+1..n.
        for m in [&mut h, &mut q] {
            for r in 0..n {
                let mut s = czero();
                for (idx, j) in (k + 1..n).enumerate() {
                    s = s + m[(r, j)] * v[idx];
                }
                for (idx, j) in (k + 1..n).enumerate() {
                    m[(r, j)] = m[(r, j)] - two * s * v[idx].conj();
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }
    (h, q)
}

/// Eigendecomposition of a Hermitian matrix: real ascending eigenvalues and
/// orthonormal eigenvectors.
pub fn eigen_hermitian<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerances,
) -> Result<EigenDecomposition<T>> {
    validate_input(a, tol)?;
    let residual = a.hermitian_residual();
    if residual > T::lit(tol.herm_tol) * T::one().max(a.max_abs()) {
        return Err(Error::NotHermitian {
            residual: residual.to_f64_lossy(),
        });
    }
    let n = a.dim();
    // Symmetrise exactly before rotating.
    let mut m = ComplexMatrix::zeros(n);
    let half = cr(T::lit(0.5));
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = (a[(i, j)] + a[(j, i)].conj()) * half;
        }
        m[(i, i)] = cr(m[(i, i)].re);
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.norm_fro();
    let target = T::epsilon() * T::epsilon() * scale * scale;
    let mut converged = n == 1 || scale == T::zero();
    for _ in 0..MAX_JACOBI_SWEEPS {
        if converged {
            break;
        }
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)].norm_sqr())
            .sum();
        if off > target * T::lit(1e4) {
            return Err(Error::NonConvergence {
                iterations: MAX_JACOBI_SWEEPS,
            });
        }
    }
    let values: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].partial_cmp(&values[y]).unwrap_or(Ordering::Equal));
    let mut eigenvalues = Vec::with_capacity(n);
    let mut right_vectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for k in order {
        let vec = v.column(k);
        let lambda = cr(values[k]);
        residuals.push((&a.matvec(&vec) - &vec.scale(lambda)).norm());
        eigenvalues.push(lambda);
        right_vectors.push(vec);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        right_vectors,
        residuals,
    })
}

fn jacobi_rotate<T: Real>(
    m: &mut ComplexMatrix<T>,
    v: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
) {
    let n = m.dim();
    let apq = m[(p, q)];
    let mag = apq.norm();
    if mag == T::zero() {
        return;
    }
    // Phase D = diag(1, e^{-iθ}) on index q makes the (p, q) entry real.
    let phase = apq / cr(mag);
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let t = if theta == T::zero() { T::one() } else { t };
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;
    // Combined unitary G acting on columns p, q:
    //   col_p' = cs·col_p - sn·conj(phase)·col_q
    //   col_q' = sn·phase·col_p + cs·col_q   (in D-rotated frame)
    let g_pp = cr(cs);
    let g_qp = -cr(sn) * phase.conj();
    let g_pq = cr(sn);
    let g_qq = cr(cs) * phase.conj();
    // M <- M G
    for r in 0..n {
        let x = m[(r, p)];
        let y = m[(r, q)];
        m[(r, p)] = x * g_pp + y * g_qp;
        m[(r, q)] = x * g_pq + y * g_qq;
    }
    // M <- G† M
    for c in 0..n {
        let x = m[(p, c)];
        let y = m[(q, c)];
        m[(p, c)] = g_pp.conj() * x + g_qp.conj() * y;
        m[(q, c)] = g_pq.conj() * x + g_qq.conj() * y;
    }
    m[(p, q)] = czero();
    m[(q, p)] = czero();
    m[(p, p)] = cr(m[(p, p)].re);
    m[(q, q)] = cr(m[(q, q)].re);
    for r in 0..n {
        let x = v[(r, p)];
        let y = v[(r, q)];
        v[(r, p)] = x * g_pp + y * g_qp;
        v[(r, q)] = x * g_pq + y * g_qq;
    }
}

/// Positive square root of a Hermitian positive-definite matrix.
pub fn sqrt_psd<T: Real>(a: &ComplexMatrix<T>, tol: &Tolerances) -> Result<ComplexMatrix<T>> {
    spectral_function(a, tol, |x| x.sqrt())
}

/// Inverse of the positive square root.
pub fn inv_sqrt_psd<T: Real>(a: &ComplexMatrix<T>, tol: &Tolerances) -> Result<ComplexMatrix<T>> {
    spectral_function(a, tol, |x| T::one() / x.sqrt())
}

fn spectral_function<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerances,
    f: impl Fn(T) -> T,
) -> Result<ComplexMatrix<T>> {
    let eig = eigen_hermitian(a, tol)?;
    let floor = T::lit(tol.psd_floor) * a.norm_fro();
    let min = eig.eigenvalues[0].re;
    if !(min > floor) {
        return Err(Error::NotPositive {
            min_eigenvalue: min.to_f64_lossy(),
            floor: floor.to_f64_lossy(),
        });
    }
    let n = a.dim();
    let mut out = ComplexMatrix::zeros(n);
    for (lambda, v) in eig.eigenvalues.iter().zip(&eig.right_vectors) {
        let w = cr(f(lambda.re));
        for i in 0..n {
            let vi = v[i] * w;
            for j in 0..n {
                out[(i, j)] = out[(i, j)] + vi * v[j].conj();
            }
        }
    }
    Ok(out)
}

/// Extreme eigenvalues of a Hermitian positive matrix and their ratio.
pub fn condition_number<T: Real>(a: &ComplexMatrix<T>, tol: &Tolerances) -> Result<T> {
    let eig = eigen_hermitian(a, tol)?;
    let min = eig.eigenvalues[0].re;
    let max = eig.eigenvalues[eig.dim() - 1].re;
    if !(min > T::zero()) {
        return Err(Error::NotPositive {
            min_eigenvalue: min.to_f64_lossy(),
            floor: 0.0,
        });
    }
    Ok(max / min)
}

/// Spectral (operator 2-) norm, via the largest eigenvalue of `A† A`.
pub fn spectral_norm<T: Real>(a: &ComplexMatrix<T>, tol: &Tolerances) -> Result<T> {
    let gram = &a.dagger() * a;
    let eig = eigen_hermitian(&gram, tol)?;
    Ok(eig.eigenvalues[eig.dim() - 1].re.max(T::zero()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn diagonal_eigenpairs_are_coordinate_vectors() {
        let a = ComplexMatrix::<f64>::from_real_diagonal(&[2.0, 1.0]);
        let e = eigen_general(&a, &tol()).unwrap();
        assert_eq!(e.eigenvalues, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(e.right_vectors[0].distance_up_to_scalar(&ComplexVector::basis(2, 1)) < 1e-15);
        assert!(e.right_vectors[1].distance_up_to_scalar(&ComplexVector::basis(2, 0)) < 1e-15);
    }

    #[test]
    fn degenerate_spectrum_is_rejected() {
        let a = ComplexMatrix::<f64>::identity(3);
        assert!(matches!(
            eigen_general(&a, &tol()),
            Err(Error::DegenerateSpectrum { .. })
        ));
        let z = ComplexMatrix::<f64>::zeros(2);
        assert!(matches!(
            eigen_general(&z, &tol()),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn dimension_cap_and_non_finite_input() {
        let mut t = tol();
        t.max_dim = 2;
        let a = ComplexMatrix::<f64>::from_real_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(
            eigen_general(&a, &t),
            Err(Error::DimensionTooLarge { dim: 3, max: 2 })
        );
        let mut b = ComplexMatrix::<f64>::identity(2);
        b[(0, 1)] = c(f64::NAN, 0.0);
        assert_eq!(eigen_general(&b, &tol()), Err(Error::NonFinite));
    }

    #[test]
    fn canonical_order_groups_equal_real_parts_by_imaginary_part() {
        let v = vec![c(1.0, 0.2), c(-3.0, 0.0), c(1.0 + 1e-16, -0.2)];
        assert_eq!(canonical_order(&v, 1e-12), vec![1, 2, 0]);
    }

    #[test]
    fn complex_conjugate_pair() {
        // Rotation generator with eigenvalues ±i.
        let a = ComplexMatrix::<f64>::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let e = eigen_general(&a, &tol()).unwrap();
        assert!((e.eigenvalues[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((e.eigenvalues[1] - c(0.0, 1.0)).norm() < 1e-14);
        assert!(e.max_residual() < 1e-14);
    }

    #[test]
    fn jordan_like_triangular_input() {
        let a = ComplexMatrix::<f64>::from_real_rows(&[
            vec![1.0, 100.0, 0.0],
            vec![0.0, 2.0, 100.0],
            vec![0.0, 0.0, 3.0],
        ])
        .unwrap();
        let e = eigen_general(&a, &tol()).unwrap();
        assert!(e.max_residual() <= 1e-10 * a.norm_fro());
        for (k, want) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert!((e.eigenvalues[k].re - want).abs() < 1e-10);
        }
    }

    #[test]
    fn hermitian_rejects_non_hermitian() {
        let a = ComplexMatrix::<f64>::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            eigen_hermitian(&a, &tol()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn hermitian_complex_offdiagonal() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(2.0f64, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0)],
        ])
        .unwrap();
        let e = eigen_hermitian(&a, &tol()).unwrap();
        assert!((e.eigenvalues[0].re - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1].re - 3.0).abs() < 1e-14);
        assert!(e.max_residual() < 1e-14);
        assert!(e.right_vectors[0].dot(&e.right_vectors[1]).norm() < 1e-14);
    }

    #[test]
    fn sqrt_of_diagonal_and_not_positive() {
        let a = ComplexMatrix::<f64>::from_real_diagonal(&[4.0, 9.0]);
        let b = sqrt_psd(&a, &tol()).unwrap();
        assert!(b.distance(&ComplexMatrix::from_real_diagonal(&[2.0, 3.0])) < 1e-14);
        let neg = ComplexMatrix::<f64>::from_real_diagonal(&[1.0, -1.0]);
        assert!(matches!(sqrt_psd(&neg, &tol()), Err(Error::NotPositive { .. })));
        let singular = ComplexMatrix::<f64>::from_real_diagonal(&[1.0, 0.0]);
        assert!(matches!(
            sqrt_psd(&singular, &tol()),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let a = ComplexMatrix::<f32>::from_real_rows(&[vec![1.0, 2.0], vec![0.5, -1.0]]).unwrap();
        let e = eigen_general(&a, &tol()).unwrap();
        // Eigenvalues ±√2.
        assert!((e.eigenvalues[0].re + 2f32.sqrt()).abs() < 1e-5);
        assert!((e.eigenvalues[1].re - 2f32.sqrt()).abs() < 1e-5);
        assert!(e.max_residual() < 1e-5);
    }
}
