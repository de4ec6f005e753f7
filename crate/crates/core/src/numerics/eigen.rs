//! Hermitian and Hermitian-definite generalized eigensolvers.
//!
//! The standard problem is solved with cyclic complex Jacobi rotations. The
//! generalized pair `(A, B)` is reduced through `B = L·Lᴴ` to the standard
//! problem `L⁻¹ A L⁻ᴴ y = λ y`, and the eigenvectors are mapped back with
//! `v = L⁻ᴴ y`.
//!
//! Every returned vector has unit Euclidean norm and is rotated so that its
//! largest-magnitude entry is real and positive. Pairs are ordered by
//! descending eigenvalue; numerically equal eigenvalues are ordered by a
//! lexicographic comparison of their (phase-normalized) vectors.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::cholesky::{check_hermitian, cholesky, solve_lower, solve_lower_adjoint};
use super::matrix::{norm, ComplexMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 64;
const OFF_DIAGONAL_TOL: f64 = 1e-15;
const TIE_TOL: f64 = 1e-12;
const SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<Complex64>,
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Rotates `v` so its largest-magnitude entry is real positive, and scales
/// it to unit norm.
pub fn normalize_phase(v: &mut [Complex64]) {
    let nrm = norm(v);
    if nrm == 0.0 {
        return;
    }
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let rot = v[pivot].conj() / (v[pivot].norm() * nrm);
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[pivot].im = 0.0;
}

fn snap(x: f64) -> f64 {
    if x.abs() < SNAP_TOL {
        0.0
    } else {
        x
    }
}

fn vector_order(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        // Larger entries sort first.
        let ord = snap(y.re)
            .total_cmp(&snap(x.re))
            .then(snap(y.im).total_cmp(&snap(x.im)));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

fn values_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOL * a.abs().max(1.0)
}

/// Descending by value; runs of tied values are reordered by vector.
fn sort_pairs(pairs: &mut [EigenPair]) {
    pairs.sort_by(|a, b| b.value.total_cmp(&a.value));
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && values_tied(pairs[end - 1].value, pairs[end].value) {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|a, b| vector_order(&a.vector, &b.vector));
        }
        start = end;
    }
}

/// Eigen-decomposition of a Hermitian matrix, values sorted descending.
pub fn hermitian_eig(c: &ComplexMatrix) -> Result<Vec<EigenPair>> {
    check_hermitian(c)?;
    let n = c.rows();
    // Work on the exactly Hermitian part.
    let mut a = c.add(&c.adjoint()).scale_real(0.5);
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= OFF_DIAGONAL_TOL * scale || scale == 0.0 {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure {
                sweeps,
                off_diagonal: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|i| {
            let mut vector = v.column(i);
            normalize_phase(&mut vector);
            EigenPair {
                value: a[(i, i)].re,
                vector,
            }
        })
        .collect();
    sort_pairs(&mut pairs);
    Ok(pairs)
}

/// Annihilates `a[p][q]` with the unitary `J = diag(1, e^{-iφ}) · R(θ)` acting
/// on coordinates `(p, q)`, updating `a ← Jᴴ a J` and `v ← v J`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let cos = 1.0 / (t * t + 1.0).sqrt();
    let sin = t * cos;

    let n = a.rows();
    // J entries on (p, q):
    //   J_pp = c, J_pq = s, J_qp = -s·e^{-iφ}, J_qq = c·e^{-iφ}
    let jqp = -phase.conj() * sin;
    let jqq = phase.conj() * cos;

    // a ← a J (columns p, q)
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * cos + arq * jqp;
        a[(r, q)] = arp * sin + arq * jqq;
    }
    // a ← Jᴴ a (rows p, q)
    for c in 0..n {
        let apc = a[(p, c)];
        let aqc = a[(q, c)];
        a[(p, c)] = apc * cos + aqc * jqp.conj();
        a[(q, c)] = apc * sin + aqc * jqq.conj();
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * cos + vrq * jqp;
        v[(r, q)] = vrp * sin + vrq * jqq;
    }
}

/// Top-`k` pairs of the Hermitian-definite pencil `A v = λ B v`.
pub fn generalized_eig_top(a: &ComplexMatrix, b: &ComplexMatrix, k: usize) -> Result<Vec<EigenPair>> {
    check_hermitian(a)?;
    check_hermitian(b)?;
    let n = a.rows();
    if b.rows() != n {
        return Err(Error::ShapeMismatch(format!(
            "pencil sizes differ: A is {n}x{n}, B is {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "requested {k} eigenpairs of a {n}x{n} pencil"
        )));
    }
    let l = cholesky(b)?;
    let reduced = solve_lower(&l, &solve_lower(&l, a).adjoint());
    let mut reduced = reduced.add(&reduced.adjoint()).scale_real(0.5);
    for i in 0..n {
        reduced[(i, i)].im = 0.0;
    }
    let standard = hermitian_eig(&reduced)?;
    let mut pairs: Vec<EigenPair> = standard
        .into_iter()
        .map(|pair| {
            let y = ComplexMatrix::column_vector(&pair.vector);
            let mut vector = solve_lower_adjoint(&l, &y).column(0);
            normalize_phase(&mut vector);
            EigenPair {
                value: pair.value,
                vector,
            }
        })
        .collect();
    sort_pairs(&mut pairs);
    pairs.truncate(k);
    Ok(pairs)
}
