//! Objective evaluators and the measured effective layer SINR.
//!
//! The SLNR objectives use the noise weight of the precoder design
//! (see [`crate::precoders::layer_objective_noise`]), multiplied by the precoder power (`‖v‖²`, or `Tr(V_kᴴV_k)/L_k` for the
//! per-user forms) so that each value is invariant to rescaling the
//! precoder. For unit-norm columns the power factor is exactly 1.
//!
//! The measured SINR instead uses the actual post-combining noise
//! `σ²‖u_{k,l}‖²`, and weights every symbol stream by its `1/L_i` covariance:
//!
//! ```text
//!            (1/L_k)|T_k[l,l]|²
//! SINR = ------------------------------------------------------------------
//!        (1/L_k)Σ_{d≠l}|T_k[l,d]|² + Σ_{i≠k}(1/L_i)Σ_d|T_i[l,d]|² + σ²‖u_{k,l}‖²
//! ```
//!
//! with `T_i = U_k H_k V_i`.

use num_complex::Complex64;

use crate::channel::{ChannelSet, ReceiverKind, Scheme, SystemConfig};
use crate::error::{Error, Result};
use crate::numerics::{mat_vec, norm, row_times, ComplexMatrix};
use crate::precoders::{layer_objective_noise, user_objective_noise, PrecoderSet};
use crate::receivers::ReceiverSet;

/// One effective layer SINR observation. `user` and `layer` are 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSample {
    pub drop_id: u64,
    pub user: usize,
    pub layer: usize,
    pub scheme: Scheme,
    pub receiver: ReceiverKind,
    pub sinr_db: f64,
}

impl SinrSample {
    pub fn canonical_key(&self) -> (u64, usize, usize, Scheme, ReceiverKind) {
        (self.drop_id, self.user, self.layer, self.scheme, self.receiver)
    }
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Per-user SLNR `Tr(VᴴHᴴHV) / Tr(Vᴴ(Mσ²I + H̃ᴴH̃)V)`.
pub fn evaluate_user_slnr(
    h_k: &ComplexMatrix,
    leakage: &ComplexMatrix,
    v_k: &ComplexMatrix,
    rx_antennas: usize,
    noise_var: f64,
) -> f64 {
    let signal = h_k.matmul(v_k).frobenius_norm_sqr();
    let leaked = leakage.matmul(v_k).frobenius_norm_sqr();
    let power = v_k.frobenius_norm_sqr();
    signal / (rx_antennas as f64 * noise_var * power + leaked)
}

/// Receiver-aware per-user SLNR
/// `(1/L_k)‖U_kH_kV_k‖² / (ρ_k + Σ_{i≠k}(1/L_k)‖U_iH_iV_k‖²)`, with `ρ_k` from
/// [`user_objective_noise`] times `Tr(V_kᴴV_k)/L_k`.
pub fn evaluate_receiver_aware_user_slnr(
    channels: &ChannelSet,
    receivers: &ReceiverSet,
    v_k: &ComplexMatrix,
    config: &SystemConfig,
    k: usize,
) -> f64 {
    let layers = v_k.cols() as f64;
    let power = v_k.frobenius_norm_sqr() / layers;
    let signal = receivers.u[k].matmul(&channels.h[k]).matmul(v_k).frobenius_norm_sqr() / layers;
    let leaked: f64 = (0..channels.users())
        .filter(|&i| i != k)
        .map(|i| receivers.u[i].matmul(&channels.h[i]).matmul(v_k).frobenius_norm_sqr())
        .sum::<f64>()
        / layers;
    signal / (user_objective_noise(config, receivers, k) * power + leaked)
}

/// Layer SLNR of candidate column `v` for layer `l` of user `k`:
/// `|u_{k,l}H_kv|² / (ρ_{k,l}‖v‖² + Σ_{d≠l}|u_{k,d}H_kv|² + Σ_{i≠k}‖U_iH_iv‖²)`,
/// with `ρ_{k,l}` from [`layer_objective_noise`].
pub fn evaluate_layer_slnr(
    channels: &ChannelSet,
    receivers: &ReceiverSet,
    v: &[Complex64],
    config: &SystemConfig,
    k: usize,
    l: usize,
) -> f64 {
    let hv = mat_vec(&channels.h[k], v);
    let own = mat_vec(&receivers.u[k], &hv);
    let signal = own[l].norm_sqr();
    let intra: f64 = own
        .iter()
        .enumerate()
        .filter(|&(d, _)| d != l)
        .map(|(_, z)| z.norm_sqr())
        .sum();
    let inter: f64 = (0..channels.users())
        .filter(|&i| i != k)
        .map(|i| {
            let r = mat_vec(&receivers.u[i], &mat_vec(&channels.h[i], v));
            norm(&r).powi(2)
        })
        .sum();
    let noise = layer_objective_noise(config, receivers, k, l) * norm(v).powi(2);
    signal / (noise + intra + inter)
}

/// Power terms of the measured SINR for layer `l` of user `k` (linear scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrTerms {
    pub signal: f64,
    pub intra_user: f64,
    pub inter_user: f64,
    pub noise: f64,
}

impl SinrTerms {
    pub fn sinr(&self) -> f64 {
        self.signal / (self.intra_user + self.inter_user + self.noise)
    }
}

pub fn layer_sinr_terms(
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    receivers: &ReceiverSet,
    config: &SystemConfig,
    k: usize,
    l: usize,
) -> SinrTerms {
    let u = receivers.row(k, l);
    let g = row_times(u, &channels.h[k]);
    let mut terms = SinrTerms {
        signal: 0.0,
        intra_user: 0.0,
        inter_user: 0.0,
        noise: config.noise_var * norm(u).powi(2),
    };
    for (i, v_i) in precoders.v.iter().enumerate() {
        let weight = 1.0 / v_i.cols() as f64;
        let t = row_times(&g, v_i);
        if i == k {
            for (d, z) in t.iter().enumerate() {
                if d == l {
                    terms.signal += weight * z.norm_sqr();
                } else {
                    terms.intra_user += weight * z.norm_sqr();
                }
            }
        } else {
            terms.inter_user += weight * t.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
    }
    terms
}

/// Effective layer SINR in dB.
pub fn effective_layer_sinr(
    channels: &ChannelSet,
    precoders: &PrecoderSet,
    receivers: &ReceiverSet,
    config: &SystemConfig,
    k: usize,
    l: usize,
) -> f64 {
    to_db(layer_sinr_terms(channels, precoders, receivers, config, k, l).sinr())
}

/// Empirical CDF over distinct sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    /// `(value, P[X ≤ value])`, values strictly increasing.
    pub points: Vec<(f64, f64)>,
    pub count: usize,
}

pub fn empirical_cdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        let p = (i + 1) as f64 / n as f64;
        match points.last_mut() {
            Some(last) if last.0 == x => last.1 = p,
            _ => points.push((x, p)),
        }
    }
    Ok(EmpiricalCdf { points, count: n })
}

impl EmpiricalCdf {
    /// Smallest value whose cumulative probability is at least `p`. Values of
    /// `p` above 1 return the maximum.
    pub fn percentile(&self, p: f64) -> f64 {
        // Probabilities are i/n; compare on counts to avoid rounding at p = i/n.
        let n = self.count as f64;
        let first = self.points.partition_point(|&(_, q)| (q * n).round() < p * n - 1e-9);
        self.points[first.min(self.points.len() - 1)].0
    }
}

pub fn percentile(cdf: &EmpiricalCdf, p: f64) -> f64 {
    cdf.percentile(p)
}
