use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::HERMITIAN_TOL;
use crate::error::{Error, Result};

pub(crate) fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Cholesky factor `L` (lower-triangular, real positive diagonal) with
/// `L·Lᴴ = B`. Any non-positive pivot is reported, never regularized.
pub fn cholesky(b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_hermitian(b)?;
    let n = b.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut diag = b[(j, j)].re;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if !(diag.is_finite() && diag > 0.0) {
            return Err(Error::NotPositiveDefinite { index: j, value: diag });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L·X = rhs` for lower-triangular `L`.
pub fn solve_lower(l: &ComplexMatrix, rhs: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    assert_eq!(rhs.rows(), n, "solve_lower shape mismatch");
    let mut x = rhs.clone();
    for c in 0..rhs.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Solves `Lᴴ·X = rhs` for lower-triangular `L`.
pub fn solve_lower_adjoint(l: &ComplexMatrix, rhs: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    assert_eq!(rhs.rows(), n, "solve_lower_adjoint shape mismatch");
    let mut x = rhs.clone();
    for c in 0..rhs.cols() {
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in (i + 1)..n {
                s -= l[(k, i)].conj() * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)].conj();
        }
    }
    x
}

/// Solves `B·X = rhs` for Hermitian positive-definite `B`.
pub fn cholesky_solve(b: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    let l = cholesky(b)?;
    Ok(solve_lower_adjoint(&l, &solve_lower(&l, rhs)))
}
