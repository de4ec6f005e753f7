//! Scenario configuration and i.i.d. Rayleigh channel generation.
//!
//! Each user's channel for a drop is drawn from its own ChaCha20 stream whose
//! 256-bit key is `(seed, drop_id, user, attempt)` packed little-endian. The
//! complex Gaussian entries come from the Box–Muller transform
//! `r = sqrt(-ln u1)`, `re = r cos(2π u2)`, `im = r sin(2π u2)` with
//! `u1 ∈ (0, 1]` and `u2 ∈ [0, 1)` taken from the stream in that order,
//! row-major over the `M_k × N` matrix. That gives variance 1/2 per real and
//! imaginary part. Drops can therefore be generated in any order, on any
//! thread, with identical results.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Per-user SLNR precoder, fixed after the first solve.
    OriginalSlnr,
    /// Per-layer SLNR precoder driven by the previous receiver.
    LayerSlnr,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::OriginalSlnr, Scheme::LayerSlnr];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::OriginalSlnr => "original_slnr",
            Scheme::LayerSlnr => "layer_slnr",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original_slnr" => Ok(Scheme::OriginalSlnr),
            "layer_slnr" => Ok(Scheme::LayerSlnr),
            other => Err(Error::InvalidConfig(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    MatchedFilter,
    Mmse,
}

impl ReceiverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReceiverKind::MatchedFilter => "matched_filter",
            ReceiverKind::Mmse => "mmse",
        }
    }
}

impl fmt::Display for ReceiverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ReceiverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matched_filter" => Ok(ReceiverKind::MatchedFilter),
            "mmse" => Ok(ReceiverKind::Mmse),
            other => Err(Error::InvalidConfig(format!("unknown receiver '{other}'"))),
        }
    }
}

/// Noise weight used in the per-layer SLNR objective.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveNoise {
    /// `σ²‖u_{k,l}‖²`, the noise power at the layer's combiner output.
    #[default]
    CombinerWeighted,
    /// `M_k σ²`, independent of the combiner.
    Printed,
}

impl ObjectiveNoise {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveNoise::CombinerWeighted => "combiner_weighted",
            ObjectiveNoise::Printed => "printed",
        }
    }
}

/// All parameters of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Transmit antennas `N`.
    pub n_tx: usize,
    /// Number of users `K`.
    pub users: usize,
    /// Receive antennas `M_k`, one per user.
    pub rx_antennas: Vec<usize>,
    /// Data layers `L_k`, one per user.
    pub layers: Vec<usize>,
    /// Noise variance per receive antenna, shared by all users.
    pub noise_var: f64,
    pub scheme: Scheme,
    pub receiver: ReceiverKind,
    /// Precoder/receiver alternations after the bootstrap solve.
    pub feedback_iters: usize,
    pub drops: usize,
    pub seed: u64,
    pub objective_noise: ObjectiveNoise,
}

impl SystemConfig {
    pub const DEFAULT_FEEDBACK_ITERS: usize = 10;
    pub const DEFAULT_DROPS: usize = 10_000;

    /// The N = 8, K = 3, M_k = 3, L_k = 2, σ² = 1 scenario.
    pub fn reference(scheme: Scheme, receiver: ReceiverKind) -> Self {
        Self {
            n_tx: 8,
            users: 3,
            rx_antennas: vec![3; 3],
            layers: vec![2; 3],
            noise_var: 1.0,
            scheme,
            receiver,
            feedback_iters: Self::DEFAULT_FEEDBACK_ITERS,
            drops: Self::DEFAULT_DROPS,
            seed: 42,
            objective_noise: ObjectiveNoise::default(),
        }
    }

    pub fn total_layers(&self) -> usize {
        self.layers.iter().sum()
    }

    /// Checks the hard invariants and returns soft warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_tx == 0 {
            return bad("n_tx must be at least 1".into());
        }
        if self.users == 0 {
            return bad("users must be at least 1".into());
        }
        if self.rx_antennas.len() != self.users {
            return bad(format!(
                "rx_antennas has {} entries but users = {}",
                self.rx_antennas.len(),
                self.users
            ));
        }
        if self.layers.len() != self.users {
            return bad(format!(
                "layers has {} entries but users = {}",
                self.layers.len(),
                self.users
            ));
        }
        for (k, (&m, &l)) in self.rx_antennas.iter().zip(&self.layers).enumerate() {
            if m == 0 {
                return bad(format!("rx_antennas[{k}] must be at least 1"));
            }
            if l == 0 {
                return bad(format!("layers[{k}] must be at least 1"));
            }
            if l > m.min(self.n_tx) {
                return bad(format!(
                    "layers[{k}] = {l} exceeds min(rx_antennas[{k}] = {m}, n_tx = {})",
                    self.n_tx
                ));
            }
        }
        if !(self.noise_var.is_finite() && self.noise_var > 0.0) {
            return bad(format!("noise_var must be finite and > 0, got {}", self.noise_var));
        }
        if self.receiver == ReceiverKind::Mmse && self.rx_antennas.iter().any(|&m| m != self.rx_antennas[0]) {
            return bad("receiver mmse requires equal rx_antennas for every user".into());
        }
        let mut warnings = Vec::new();
        if self.total_layers() > self.n_tx {
            warnings.push(format!(
                "total layers {} exceed n_tx = {}; leakage cannot be nulled",
                self.total_layers(),
                self.n_tx
            ));
        }
        Ok(warnings)
    }
}

/// The per-user channel matrices `H_k` (`M_k × N`) of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub drop_id: u64,
    pub h: Vec<ComplexMatrix>,
}

impl ChannelSet {
    pub fn users(&self) -> usize {
        self.h.len()
    }

    pub fn n_tx(&self) -> usize {
        self.h.first().map_or(0, |h| h.cols())
    }
}

fn stream_key(seed: u64, drop_id: u64, user: u64, attempt: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    for (chunk, word) in key.chunks_exact_mut(8).zip([seed, drop_id, user, attempt]) {
        chunk.copy_from_slice(&word.to_le_bytes());
    }
    key
}

/// One `CN(0, 1)` draw.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    let r = (-u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    Complex64::new(r * c, r * s)
}

/// The deterministic stream for `(seed, drop_id, user, attempt)`.
pub fn user_stream(seed: u64, drop_id: u64, user: usize, attempt: u32) -> ChaCha20Rng {
    ChaCha20Rng::from_seed(stream_key(seed, drop_id, user as u64, attempt as u64))
}

pub fn generate_channels(config: &SystemConfig, drop_id: u64) -> ChannelSet {
    generate_channels_attempt(config, drop_id, 0)
}

/// Channels for a drop on resample sub-stream `attempt` (0 = primary).
pub fn generate_channels_attempt(config: &SystemConfig, drop_id: u64, attempt: u32) -> ChannelSet {
    let h = config
        .rx_antennas
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let mut rng = user_stream(config.seed, drop_id, k, attempt);
            ComplexMatrix::from_fn(m, config.n_tx, |_, _| complex_gaussian(&mut rng))
        })
        .collect();
    ChannelSet { drop_id, h }
}
