//! Dense complex linear algebra.

mod cholesky;
mod eigen;
mod matrix;

pub use cholesky::{cholesky, cholesky_solve, solve_lower, solve_lower_adjoint};
pub use eigen::{generalized_eig_top, hermitian_eig, normalize_phase, EigenPair};
pub use matrix::{inner, mat_vec, norm, row_times, ComplexMatrix};

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
