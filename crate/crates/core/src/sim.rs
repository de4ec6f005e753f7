//! Drop simulation and Monte Carlo campaigns.
//!
//! A drop draws one block-static channel set. The bootstrap state (`t = 0`)
//! uses the per-user SLNR precoder and the configured receiver. For the
//! layer scheme, each of the `feedback_iters` iterations recomputes the
//! per-layer precoder from the previous combiners and then refreshes the
//! combiners. SINR is measured on the final precoder/combiner pair.

use rayon::prelude::*;

use crate::channel::{generate_channels_attempt, ChannelSet, ReceiverKind, Scheme, SystemConfig};
use crate::error::{Error, Result};
use crate::metrics::{effective_layer_sinr, empirical_cdf, evaluate_layer_slnr, EmpiricalCdf, SinrSample};
use crate::precoders::{layer_slnr_precoder, slnr_user_precoder, PrecoderSet};
use crate::receivers::{compute_receivers, ReceiverSet};

/// Percentiles reported in every campaign summary.
pub const PERCENTILES: [f64; 7] = [0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95];

/// Resample sub-streams tried before a drop is declared a failure.
pub const MAX_RESAMPLES: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DropResult {
    pub drop_id: u64,
    pub samples: Vec<SinrSample>,
    /// Layer SLNR of every `(k, l)` (flattened user-major) at each state
    /// `t = 0..=T`, evaluated at the precoder and the refreshed combiners.
    pub objective_trace: Vec<Vec<f64>>,
    /// Degenerate channel draws skipped before this drop succeeded.
    pub resamples: u32,
}

/// Both schemes on the same channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedDrop {
    pub original: DropResult,
    pub layer: DropResult,
}

struct State {
    precoders: PrecoderSet,
    receivers: ReceiverSet,
}

fn layer_objectives(channels: &ChannelSet, state: &State, config: &SystemConfig) -> Vec<f64> {
    let mut out = Vec::with_capacity(config.total_layers());
    for k in 0..channels.users() {
        for l in 0..config.layers[k] {
            let v = state.precoders.column(k, l);
            out.push(evaluate_layer_slnr(channels, &state.receivers, &v, config, k, l));
        }
    }
    out
}

fn record(channels: &ChannelSet, state: &State, config: &SystemConfig, scheme: Scheme) -> Vec<SinrSample> {
    let mut out = Vec::with_capacity(config.total_layers());
    for k in 0..channels.users() {
        for l in 0..config.layers[k] {
            out.push(SinrSample {
                drop_id: channels.drop_id,
                user: k + 1,
                layer: l + 1,
                scheme,
                receiver: config.receiver,
                sinr_db: effective_layer_sinr(channels, &state.precoders, &state.receivers, config, k, l),
            });
        }
    }
    out
}

fn bootstrap(channels: &ChannelSet, config: &SystemConfig) -> Result<State> {
    let precoders = slnr_user_precoder(channels, config)?;
    let receivers = compute_receivers(config.receiver, channels, &precoders, config.noise_var)?;
    Ok(State { precoders, receivers })
}

fn iterate(channels: &ChannelSet, config: &SystemConfig, state: State) -> Result<State> {
    let precoders = layer_slnr_precoder(channels, &state.receivers, config)?;
    let receivers = compute_receivers(config.receiver, channels, &precoders, config.noise_var)?;
    Ok(State { precoders, receivers })
}

/// Runs both schemes on one channel set. The original scheme is the
/// bootstrap state; the layer scheme continues from it.
pub fn simulate_paired(channels: &ChannelSet, config: &SystemConfig) -> Result<PairedDrop> {
    let mut state = bootstrap(channels, config)?;
    let start_trace = layer_objectives(channels, &state, config);
    let original = DropResult {
        drop_id: channels.drop_id,
        samples: record(channels, &state, config, Scheme::OriginalSlnr),
        objective_trace: vec![start_trace.clone()],
        resamples: 0,
    };
    let mut trace = vec![start_trace];
    for _ in 0..config.feedback_iters {
        state = iterate(channels, config, state)?;
        trace.push(layer_objectives(channels, &state, config));
    }
    let layer = DropResult {
        drop_id: channels.drop_id,
        samples: record(channels, &state, config, Scheme::LayerSlnr),
        objective_trace: trace,
        resamples: 0,
    };
    Ok(PairedDrop { original, layer })
}

/// Runs `config.scheme` on one channel set.
pub fn simulate(channels: &ChannelSet, config: &SystemConfig) -> Result<DropResult> {
    match config.scheme {
        Scheme::OriginalSlnr => {
            let state = bootstrap(channels, config)?;
            Ok(DropResult {
                drop_id: channels.drop_id,
                samples: record(channels, &state, config, Scheme::OriginalSlnr),
                objective_trace: vec![layer_objectives(channels, &state, config)],
                resamples: 0,
            })
        }
        Scheme::LayerSlnr => Ok(simulate_paired(channels, config)?.layer),
    }
}

fn with_resampling<T>(
    config: &SystemConfig,
    drop_id: u64,
    mut run: impl FnMut(&ChannelSet) -> Result<T>,
) -> Result<(T, u32)> {
    let mut last = None;
    for attempt in 0..MAX_RESAMPLES {
        let channels = generate_channels_attempt(config, drop_id, attempt);
        match run(&channels) {
            Ok(out) => return Ok((out, attempt)),
            Err(err @ Error::DegenerateChannel { .. }) => last = Some(err),
            Err(err) => return Err(err),
        }
    }
    Err(last.expect("at least one attempt"))
}

pub fn run_drop(config: &SystemConfig, drop_id: u64) -> Result<DropResult> {
    let (mut result, resamples) = with_resampling(config, drop_id, |ch| simulate(ch, config))?;
    result.resamples = resamples;
    Ok(result)
}

pub fn run_paired_drop(config: &SystemConfig, drop_id: u64) -> Result<PairedDrop> {
    let (mut pair, resamples) = with_resampling(config, drop_id, |ch| simulate_paired(ch, config))?;
    pair.original.resamples = resamples;
    pair.layer.resamples = resamples;
    Ok(pair)
}

fn map_drops<T: Send>(
    config: &SystemConfig,
    execution: Execution,
    f: impl Fn(u64) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    let ids = 1..=config.drops as u64;
    match execution {
        Execution::Serial => ids.map(f).collect(),
        Execution::Parallel => ids.into_par_iter().map(f).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSummary {
    pub scheme: Scheme,
    pub receiver: ReceiverKind,
    pub drops: usize,
    pub resamples: u64,
    /// `(p, SINR dB)` for each of [`PERCENTILES`].
    pub percentiles: Vec<(f64, f64)>,
    pub cdf: EmpiricalCdf,
}

impl CampaignSummary {
    pub fn from_samples(
        scheme: Scheme,
        receiver: ReceiverKind,
        drops: usize,
        resamples: u64,
        samples: &[SinrSample],
    ) -> Result<Self> {
        let values: Vec<f64> = samples.iter().map(|s| s.sinr_db).collect();
        let cdf = empirical_cdf(&values)?;
        let percentiles = PERCENTILES.iter().map(|&p| (p, cdf.percentile(p))).collect();
        Ok(Self {
            scheme,
            receiver,
            drops,
            resamples,
            percentiles,
            cdf,
        })
    }

    pub fn percentile(&self, p: f64) -> f64 {
        self.cdf.percentile(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutput {
    pub summary: CampaignSummary,
    /// Canonically sorted by `(drop_id, user, layer)`.
    pub samples: Vec<SinrSample>,
}

fn sort_canonical(samples: &mut [SinrSample]) {
    samples.sort_by_key(|s| s.canonical_key());
}

fn check_drops(config: &SystemConfig) -> Result<()> {
    if config.drops == 0 {
        return Err(Error::InvalidConfig("drops must be at least 1".into()));
    }
    config.validate().map(|_| ())
}

pub fn run_campaign(config: &SystemConfig) -> Result<CampaignOutput> {
    run_campaign_with(config, Execution::Parallel)
}

pub fn run_campaign_with(config: &SystemConfig, execution: Execution) -> Result<CampaignOutput> {
    check_drops(config)?;
    let drops = map_drops(config, execution, |id| run_drop(config, id))?;
    let resamples = drops.iter().map(|d| u64::from(d.resamples)).sum();
    let mut samples: Vec<SinrSample> = drops.into_iter().flat_map(|d| d.samples).collect();
    sort_canonical(&mut samples);
    let summary = CampaignSummary::from_samples(config.scheme, config.receiver, config.drops, resamples, &samples)?;
    Ok(CampaignOutput { summary, samples })
}

/// Per-layer `layer_slnr − original_slnr` SINR difference on one drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerDelta {
    pub drop_id: u64,
    pub user: usize,
    pub layer: usize,
    pub delta_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedReport {
    pub original: CampaignOutput,
    pub layer: CampaignOutput,
    pub deltas: Vec<LayerDelta>,
}

impl PairedReport {
    /// Layer-minus-original gap at percentile `p` of the two CDFs.
    pub fn percentile_gap(&self, p: f64) -> f64 {
        self.layer.summary.percentile(p) - self.original.summary.percentile(p)
    }

    pub fn mean_delta(&self) -> f64 {
        self.deltas.iter().map(|d| d.delta_db).sum::<f64>() / self.deltas.len() as f64
    }
}

/// Both schemes over identical channel draws.
pub fn compare_schemes(config: &SystemConfig) -> Result<PairedReport> {
    compare_schemes_with(config, Execution::Parallel)
}

pub fn compare_schemes_with(config: &SystemConfig, execution: Execution) -> Result<PairedReport> {
    check_drops(config)?;
    let pairs = map_drops(config, execution, |id| run_paired_drop(config, id))?;
    let resamples: u64 = pairs.iter().map(|p| u64::from(p.layer.resamples)).sum();

    let mut deltas = Vec::with_capacity(pairs.len() * config.total_layers());
    let mut original = Vec::with_capacity(deltas.capacity());
    let mut layer = Vec::with_capacity(deltas.capacity());
    for pair in pairs {
        for (a, b) in pair.original.samples.iter().zip(&pair.layer.samples) {
            debug_assert_eq!((a.drop_id, a.user, a.layer), (b.drop_id, b.user, b.layer));
            deltas.push(LayerDelta {
                drop_id: a.drop_id,
                user: a.user,
                layer: a.layer,
                delta_db: b.sinr_db - a.sinr_db,
            });
        }
        original.extend(pair.original.samples);
        layer.extend(pair.layer.samples);
    }
    sort_canonical(&mut original);
    sort_canonical(&mut layer);
    let summary = |scheme, samples: &[SinrSample]| {
        CampaignSummary::from_samples(scheme, config.receiver, config.drops, resamples, samples)
    };
    Ok(PairedReport {
        original: CampaignOutput {
            summary: summary(Scheme::OriginalSlnr, &original)?,
            samples: original,
        },
        layer: CampaignOutput {
            summary: summary(Scheme::LayerSlnr, &layer)?,
            samples: layer,
        },
        deltas,
    })
}
