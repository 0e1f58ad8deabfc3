use super::matrix::{ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// LU factorisation with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: ComplexMatrix<T>,
    pivots: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn factorize(a: &ComplexMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut pivots: Vec<usize> = (0..n).collect();
        let tiny = T::epsilon() * a.max_abs();
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if !(best > tiny) {
                return Err(Error::Singular { pivot: k });
            }
            if p != k {
                pivots.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * u;
                }
            }
        }
        Ok(Self { lu, pivots })
    }

    pub fn solve(&self, b: &ComplexVector<T>) -> ComplexVector<T> {
        let n = self.lu.dim();
        let mut y: Vec<_> = (0..n).map(|i| b[self.pivots[i]]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] = y[i] - self.lu[(i, j)] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] = y[i] - self.lu[(i, j)] * y[j];
            }
            y[i] = y[i] / self.lu[(i, i)];
        }
        ComplexVector::from_vec(y)
    }

    pub fn inverse(&self) -> ComplexMatrix<T> {
        let n = self.lu.dim();
        let cols: Vec<_> = (0..n)
            .map(|j| self.solve(&ComplexVector::basis(n, j)))
            .collect();
        ComplexMatrix::from_columns(&cols).expect("square inverse")
    }
}

pub fn inverse<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(Lu::factorize(a)?.inverse())
}

/// Solves `A x = b`.
pub fn solve<T: Real>(a: &ComplexMatrix<T>, b: &ComplexVector<T>) -> Result<ComplexVector<T>> {
    Ok(Lu::factorize(a)?.solve(b))
}
