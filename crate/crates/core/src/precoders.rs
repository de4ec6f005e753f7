//! Leakage-based precoders.
//!
//! Both schemes maximize a Rayleigh quotient `vᴴAv / vᴴBv` whose denominator
//! `B = noise·I + LᴴL` stacks a leakage channel `L`:
//!
//! * per-user SLNR: `A = H_kᴴH_k`, `L = H̃_k` (all other users' channels),
//!   and the `L_k` columns of `V_k` are the leading generalized eigenvectors;
//! * per-layer SLNR: `A = G_klᴴG_kl` with `G_kl = u_{k,l}H_k`, and `L = Ḡ_kl`
//!   stacks the receiver-projected channels of the user's other layers and of
//!   every other user's layers. Each `v_{k,l}` is a single top eigenvector.
//!
//! The per-user noise weight is `M_k σ²`. The per-layer weight is set by
//! [`ObjectiveNoise`]: `σ²‖u_{k,l}‖²` by default, or `M_k σ²`. Every column is
//! unit-norm, so `Tr(V_kᴴV_k) = L_k`.

use crate::channel::{ChannelSet, ObjectiveNoise, SystemConfig};
use crate::error::Result;
use crate::numerics::{generalized_eig_top, inner, mat_vec, norm, ComplexMatrix};
use crate::receivers::ReceiverSet;

#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSet {
    /// `V_k`, `N × L_k`.
    pub v: Vec<ComplexMatrix>,
    /// Objective value (generalized eigenvalue) behind each column of `V_k`.
    pub values: Vec<Vec<f64>>,
}

impl PrecoderSet {
    pub fn column(&self, k: usize, l: usize) -> Vec<num_complex::Complex64> {
        self.v[k].column(l)
    }
}

/// `H̃_k`: every `H_i`, `i ≠ k`, stacked vertically in ascending `i`.
pub fn build_user_leakage(channels: &ChannelSet, k: usize) -> ComplexMatrix {
    ComplexMatrix::vstack(
        channels.n_tx(),
        channels
            .h
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, h)| h),
    )
}

/// `M_k σ²`, the noise weight of the per-user SLNR objective.
pub fn objective_noise(config: &SystemConfig, k: usize) -> f64 {
    config.rx_antennas[k] as f64 * config.noise_var
}

/// Noise weight of the layer SLNR objective for layer `l` of user `k`.
pub fn layer_objective_noise(config: &SystemConfig, receivers: &ReceiverSet, k: usize, l: usize) -> f64 {
    match config.objective_noise {
        ObjectiveNoise::CombinerWeighted => config.noise_var * norm(receivers.row(k, l)).powi(2),
        ObjectiveNoise::Printed => objective_noise(config, k),
    }
}

/// Noise weight of the receiver-aware per-user objective: the layer weights
/// of user `k` averaged over its layers.
pub fn user_objective_noise(config: &SystemConfig, receivers: &ReceiverSet, k: usize) -> f64 {
    match config.objective_noise {
        ObjectiveNoise::CombinerWeighted => {
            config.noise_var * receivers.u[k].frobenius_norm_sqr() / receivers.u[k].rows() as f64
        }
        ObjectiveNoise::Printed => objective_noise(config, k),
    }
}

/// The pencil `(H_kᴴH_k, M_kσ²I + H̃_kᴴH̃_k)`.
pub fn user_slnr_pencil(channels: &ChannelSet, config: &SystemConfig, k: usize) -> (ComplexMatrix, ComplexMatrix) {
    let n = channels.n_tx();
    let leakage = build_user_leakage(channels, k);
    let a = channels.h[k].gram();
    let b = leakage
        .gram()
        .add(&ComplexMatrix::scaled_identity(n, objective_noise(config, k)));
    (a, b)
}

pub fn slnr_user_precoder(channels: &ChannelSet, config: &SystemConfig) -> Result<PrecoderSet> {
    let mut v = Vec::with_capacity(channels.users());
    let mut values = Vec::with_capacity(channels.users());
    for k in 0..channels.users() {
        let (a, b) = user_slnr_pencil(channels, config, k);
        let pairs = generalized_eig_top(&a, &b, config.layers[k])?;
        let mut vk = ComplexMatrix::zeros(channels.n_tx(), config.layers[k]);
        for (l, pair) in pairs.iter().enumerate() {
            vk.set_column(l, &pair.vector);
        }
        v.push(vk);
        values.push(pairs.iter().map(|p| p.value).collect());
    }
    Ok(PrecoderSet { v, values })
}

/// Receiver-projected channels seen by layer `l` of user `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    /// `G_kl = u_{k,l} H_k`, `1 × N`.
    pub desired: ComplexMatrix,
    /// `Ĝ_kl`: rows `u_{k,d} H_k`, `d ≠ l`.
    pub intra_user: ComplexMatrix,
    /// `G̃_kl`: blocks `U_i H_i`, `i ≠ k`, ascending `i`.
    pub inter_user: ComplexMatrix,
}

impl EffectiveChannels {
    pub fn build(channels: &ChannelSet, receivers: &ReceiverSet, k: usize, l: usize) -> Self {
        let n = channels.n_tx();
        let projected = receivers.u[k].matmul(&channels.h[k]);
        let layers = projected.rows();
        let others: Vec<ComplexMatrix> = (0..channels.users())
            .filter(|&i| i != k)
            .map(|i| receivers.u[i].matmul(&channels.h[i]))
            .collect();
        Self {
            desired: projected.row_matrix(l),
            intra_user: projected.select_rows((0..layers).filter(|&d| d != l)),
            inter_user: ComplexMatrix::vstack(n, &others),
        }
    }

    /// `Ḡ_kl = [Ĝ_kl; G̃_kl]`.
    pub fn stacked_leakage(&self) -> ComplexMatrix {
        ComplexMatrix::vstack(self.desired.cols(), [&self.intra_user, &self.inter_user])
    }

    /// The pencil `(G_klᴴG_kl, noise·I + Ḡ_klᴴḠ_kl)`.
    pub fn pencil(&self, noise: f64) -> (ComplexMatrix, ComplexMatrix) {
        let n = self.desired.cols();
        let b = self
            .stacked_leakage()
            .gram()
            .add(&ComplexMatrix::scaled_identity(n, noise));
        (self.desired.gram(), b)
    }

    /// `vᴴGᴴGv / vᴴ(noise·I + ḠᴴḠ)v`.
    pub fn rayleigh_quotient(&self, v: &[num_complex::Complex64], noise: f64) -> f64 {
        let signal = mat_vec(&self.desired, v)[0].norm_sqr();
        let (_, b) = self.pencil(noise);
        signal / inner(v, &mat_vec(&b, v)).re
    }
}

pub fn layer_slnr_precoder(
    channels: &ChannelSet,
    receivers: &ReceiverSet,
    config: &SystemConfig,
) -> Result<PrecoderSet> {
    let mut v = Vec::with_capacity(channels.users());
    let mut values = Vec::with_capacity(channels.users());
    for k in 0..channels.users() {
        let mut vk = ComplexMatrix::zeros(channels.n_tx(), config.layers[k]);
        let mut vals = Vec::with_capacity(config.layers[k]);
        for l in 0..config.layers[k] {
            let noise = layer_objective_noise(config, receivers, k, l);
            let eff = EffectiveChannels::build(channels, receivers, k, l);
            let (a, b) = eff.pencil(noise);
            let top = generalized_eig_top(&a, &b, 1)?.swap_remove(0);
            debug_assert!((norm(&top.vector) - 1.0).abs() < 1e-12);
            vk.set_column(l, &top.vector);
            vals.push(top.value);
        }
        v.push(vk);
        values.push(vals);
    }
    Ok(PrecoderSet { v, values })
}
