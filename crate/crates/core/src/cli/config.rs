//! JSON configuration documents.

use std::path::PathBuf;

use serde::Deserialize;

use crate::channel::{ObjectiveNoise, ReceiverKind, Scheme, SystemConfig};
use crate::error::{Error, Result};

/// The on-disk form of a scenario. Mirrors [`SystemConfig`] plus output options.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub n_tx: usize,
    pub users: usize,
    pub rx_antennas: Vec<usize>,
    pub layers: Vec<usize>,
    pub noise_var: f64,
    pub scheme: Scheme,
    pub seed: u64,
    #[serde(default = "default_receiver")]
    pub receiver: ReceiverKind,
    #[serde(default = "default_feedback_iters")]
    pub feedback_iters: usize,
    #[serde(default = "default_drops")]
    pub drops: usize,
    #[serde(default)]
    pub objective_noise: ObjectiveNoise,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub emit_cdf: bool,
    #[serde(default)]
    pub emit_plot_script: bool,
}

fn default_receiver() -> ReceiverKind {
    ReceiverKind::MatchedFilter
}

fn default_feedback_iters() -> usize {
    SystemConfig::DEFAULT_FEEDBACK_ITERS
}

fn default_drops() -> usize {
    SystemConfig::DEFAULT_DROPS
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputOptions {
    /// Sample CSV destination. Sidecar files are named after its stem.
    pub output_path: Option<PathBuf>,
    pub emit_cdf: bool,
    pub emit_plot_script: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: SystemConfig,
    pub output: OutputOptions,
    pub warnings: Vec<String>,
}

impl ConfigDocument {
    pub fn split(self) -> (SystemConfig, OutputOptions) {
        let config = SystemConfig {
            n_tx: self.n_tx,
            users: self.users,
            rx_antennas: self.rx_antennas,
            layers: self.layers,
            noise_var: self.noise_var,
            scheme: self.scheme,
            receiver: self.receiver,
            feedback_iters: self.feedback_iters,
            drops: self.drops,
            seed: self.seed,
            objective_noise: self.objective_noise,
        };
        let output = OutputOptions {
            output_path: self.output_path,
            emit_cdf: self.emit_cdf,
            emit_plot_script: self.emit_plot_script,
        };
        (config, output)
    }
}

/// Parses and validates a configuration document.
///
/// Syntax errors, unknown keys and type errors become [`Error::Parse`] with
/// the 1-based position reported by the JSON parser. Invariant violations
/// become [`Error::InvalidConfig`].
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let doc: ConfigDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let (config, output) = doc.split();
    let warnings = check(&config)?;
    Ok(ParsedConfig {
        config,
        output,
        warnings,
    })
}

fn check(config: &SystemConfig) -> Result<Vec<String>> {
    if config.drops == 0 {
        return Err(Error::InvalidConfig("drops must be at least 1".into()));
    }
    config.validate()
}

/// Command-line values that replace document fields.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scheme: Option<Scheme>,
    pub receiver: Option<ReceiverKind>,
    pub drops: Option<usize>,
    pub seed: Option<u64>,
    pub feedback_iters: Option<usize>,
    pub output_path: Option<PathBuf>,
}

impl ParsedConfig {
    /// Applies `overrides` and revalidates.
    pub fn with_overrides(mut self, overrides: Overrides) -> Result<Self> {
        let c = &mut self.config;
        if let Some(s) = overrides.scheme {
            c.scheme = s;
        }
        if let Some(r) = overrides.receiver {
            c.receiver = r;
        }
        if let Some(d) = overrides.drops {
            c.drops = d;
        }
        if let Some(s) = overrides.seed {
            c.seed = s;
        }
        if let Some(t) = overrides.feedback_iters {
            c.feedback_iters = t;
        }
        if let Some(p) = overrides.output_path {
            self.output.output_path = Some(p);
        }
        self.warnings = check(&self.config)?;
        Ok(self)
    }
}
