//! Linear combiners `U_k` (`L_k × M_k`).

use crate::channel::{ChannelSet, ReceiverKind};
use crate::error::{Error, Result};
use crate::numerics::{cholesky_solve, ComplexMatrix};
use crate::precoders::PrecoderSet;

/// Below this effective-channel norm the matched filter is undefined.
pub const DEGENERATE_NORM: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverSet {
    pub u: Vec<ComplexMatrix>,
}

impl ReceiverSet {
    /// Row `l` of `U_k`.
    pub fn row(&self, k: usize, l: usize) -> &[num_complex::Complex64] {
        self.u[k].row(l)
    }
}

/// `U_k = (H_k V_k)ᴴ / ‖H_k V_k‖_F`.
pub fn matched_filter(h_k: &ComplexMatrix, v_k: &ComplexMatrix) -> Result<ComplexMatrix> {
    let effective = h_k.matmul(v_k);
    let nrm = effective.frobenius_norm();
    if nrm <= DEGENERATE_NORM {
        return Err(Error::DegenerateChannel { norm: nrm });
    }
    Ok(effective.adjoint().scale_real(1.0 / nrm))
}

/// Multi-user MMSE combiner
/// `U_k = (H_k V_k)ᴴ ((H_k V_k)(H_k V_k)ᴴ + R_k)⁻¹` with
/// `R_k = σ² I + Σ_{i≠k} (H_i V_i)(H_i V_i)ᴴ`.
///
/// `others` holds `(H_i, V_i)` for every `i ≠ k`. `R_k` uses the other users'
/// own effective channels `H_i V_i`, so each `H_i V_i` must have `M_k` rows.
/// Unit symbol power is assumed in every term.
pub fn mmse_receiver(
    h_k: &ComplexMatrix,
    v_k: &ComplexMatrix,
    others: &[(&ComplexMatrix, &ComplexMatrix)],
    noise_var: f64,
) -> Result<ComplexMatrix> {
    let effective = h_k.matmul(v_k);
    let covariance = mmse_covariance(h_k, v_k, others, noise_var)?;
    // C Uᴴ = H_k V_k with C Hermitian PD.
    Ok(cholesky_solve(&covariance, &effective)?.adjoint())
}

/// `(H_k V_k)(H_k V_k)ᴴ + R_k`, the matrix inverted by [`mmse_receiver`].
pub fn mmse_covariance(
    h_k: &ComplexMatrix,
    v_k: &ComplexMatrix,
    others: &[(&ComplexMatrix, &ComplexMatrix)],
    noise_var: f64,
) -> Result<ComplexMatrix> {
    let m = h_k.rows();
    let mut c = ComplexMatrix::scaled_identity(m, noise_var);
    for (h, v) in std::iter::once((h_k, v_k)).chain(others.iter().copied()) {
        if h.rows() != m {
            return Err(Error::ShapeMismatch(format!(
                "interferer effective channel has {} rows, combiner needs {m}",
                h.rows()
            )));
        }
        // (H V)(H V)ᴴ = Xᴴ X with X = (H V)ᴴ.
        c = c.add(&h.matmul(v).adjoint().gram());
    }
    Ok(c)
}

/// Combiners for every user under `kind`.
pub fn compute_receivers(
    kind: ReceiverKind,
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    noise_var: f64,
) -> Result<ReceiverSet> {
    let u = (0..channels.users())
        .map(|k| match kind {
            ReceiverKind::MatchedFilter => matched_filter(&channels.h[k], &precoders.v[k]),
            ReceiverKind::Mmse => {
                let others: Vec<_> = (0..channels.users())
                    .filter(|&i| i != k)
                    .map(|i| (&channels.h[i], &precoders.v[i]))
                    .collect();
                mmse_receiver(&channels.h[k], &precoders.v[k], &others, noise_var)
            }
        })
        .collect::<Result<_>>()?;
    Ok(ReceiverSet { u })
}
