//! Configuration ingestion, campaign invocation and result files.

mod config;
mod output;

use std::io::Write;
use std::path::Path;

pub use config::{parse_config, ConfigDocument, OutputOptions, Overrides, ParsedConfig};
pub use output::{
    emit_summary, format_cdf, format_deltas, format_samples, parse_samples, plot_script, read_samples, sidecar,
    write_cdf, write_deltas, write_samples, CDF_HEADER, DELTAS_HEADER, SAMPLES_HEADER,
};

use crate::error::{Error, Result};
use crate::metrics::SinrSample;
use crate::sim::{compare_schemes, run_campaign, CampaignSummary};

/// Files written by [`execute`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Written {
    pub files: Vec<std::path::PathBuf>,
}

/// Runs the configured campaign (or the paired comparison when `compare` is
/// set), prints the percentile table to `stdout` and writes the requested
/// files.
pub fn execute(parsed: &ParsedConfig, compare: bool, stdout: &mut dyn Write) -> Result<Written> {
    let config = &parsed.config;
    let mut written = Written::default();
    let out_path = parsed.output.output_path.as_deref();

    let (summaries, samples, deltas) = if compare {
        let report = compare_schemes(config)?;
        let mut samples: Vec<SinrSample> = report.original.samples.iter().chain(&report.layer.samples).cloned().collect();
        samples.sort_by_key(|s| s.canonical_key());
        let summaries = vec![report.original.summary, report.layer.summary];
        (summaries, samples, Some(report.deltas))
    } else {
        let run = run_campaign(config)?;
        (vec![run.summary], run.samples, None)
    };
    let refs: Vec<&CampaignSummary> = summaries.iter().collect();
    let table = emit_summary(&refs);
    stdout
        .write_all(table.as_bytes())
        .map_err(|e| Error::io(Path::new("<stdout>"), e))?;

    let Some(path) = out_path else {
        return Ok(written);
    };
    write_samples(&samples, path)?;
    written.files.push(path.to_path_buf());
    if let Some(deltas) = deltas {
        let p = sidecar(path, "_deltas.csv");
        write_deltas(&deltas, &p)?;
        written.files.push(p);
    }
    if parsed.output.emit_cdf {
        let p = sidecar(path, "_cdf.csv");
        write_cdf(&refs, &p)?;
        written.files.push(p);
    }
    if parsed.output.emit_plot_script {
        let p = sidecar(path, "_plot.py");
        let samples_name = path.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        let image = sidecar(Path::new(&samples_name), "_cdf.png");
        let script = plot_script(&samples_name, &image.to_string_lossy());
        std::fs::write(&p, script).map_err(|e| Error::io(&p, e))?;
        written.files.push(p);
    }
    Ok(written)
}
