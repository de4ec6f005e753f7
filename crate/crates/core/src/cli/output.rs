//! CSV sample files, the percentile table and the plot script.
//!
//! Every file is UTF-8 with LF line endings. SINR values are written with six
//! decimals so that output is byte-stable for a given configuration.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::metrics::SinrSample;
use crate::sim::{CampaignSummary, LayerDelta};

pub const SAMPLES_HEADER: &str = "drop_id,user,layer,scheme,receiver,sinr_db";
pub const DELTAS_HEADER: &str = "drop_id,user,layer,delta_db";
pub const CDF_HEADER: &str = "scheme,receiver,sinr_db,probability";

pub fn format_samples(samples: &[SinrSample]) -> String {
    let mut out = String::with_capacity(40 * (samples.len() + 1));
    out.push_str(SAMPLES_HEADER);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6}",
            s.drop_id, s.user, s.layer, s.scheme, s.receiver, s.sinr_db
        );
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Writes `samples` (expected in canonical order) as CSV.
pub fn write_samples(samples: &[SinrSample], path: &Path) -> Result<()> {
    write_file(path, &format_samples(samples))
}

fn field<T: std::str::FromStr>(value: Option<&str>, name: &str, line: usize) -> Result<T> {
    let bad = |message: String| Error::Parse {
        line,
        column: 1,
        message,
    };
    let raw = value.ok_or_else(|| bad(format!("missing field '{name}'")))?;
    raw.parse()
        .map_err(|_| bad(format!("cannot parse {name} from '{raw}'")))
}

/// Parses text produced by [`format_samples`].
pub fn parse_samples(text: &str) -> Result<Vec<SinrSample>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SAMPLES_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("expected header '{SAMPLES_HEADER}'"),
            })
        }
    }
    lines
        .map(|(i, raw)| {
            let line = i + 1;
            let mut parts = raw.split(',');
            let sample = SinrSample {
                drop_id: field(parts.next(), "drop_id", line)?,
                user: field(parts.next(), "user", line)?,
                layer: field(parts.next(), "layer", line)?,
                scheme: field(parts.next(), "scheme", line)?,
                receiver: field(parts.next(), "receiver", line)?,
                sinr_db: field(parts.next(), "sinr_db", line)?,
            };
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    message: "too many fields".into(),
                });
            }
            Ok(sample)
        })
        .collect()
}

pub fn read_samples(path: &Path) -> Result<Vec<SinrSample>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_samples(&text)
}

pub fn format_deltas(deltas: &[LayerDelta]) -> String {
    let mut out = String::from(DELTAS_HEADER);
    out.push('\n');
    for d in deltas {
        let _ = writeln!(out, "{},{},{},{:.6}", d.drop_id, d.user, d.layer, d.delta_db);
    }
    out
}

pub fn write_deltas(deltas: &[LayerDelta], path: &Path) -> Result<()> {
    write_file(path, &format_deltas(deltas))
}

pub fn format_cdf(summaries: &[&CampaignSummary]) -> String {
    let mut out = String::from(CDF_HEADER);
    out.push('\n');
    for s in summaries {
        for &(x, p) in &s.cdf.points {
            let _ = writeln!(out, "{},{},{:.6},{:.6}", s.scheme, s.receiver, x, p);
        }
    }
    out
}

pub fn write_cdf(summaries: &[&CampaignSummary], path: &Path) -> Result<()> {
    write_file(path, &format_cdf(summaries))
}

/// Percentile table with one row per summary at each percentile, plus a gap
/// column when exactly two summaries are given.
pub fn emit_summary(summaries: &[&CampaignSummary]) -> String {
    let mut out = String::new();
    for s in summaries {
        let _ = writeln!(
            out,
            "# {} / {}: {} drops, {} samples, {} resampled",
            s.scheme, s.receiver, s.drops, s.cdf.count, s.resamples
        );
    }
    let paired = summaries.len() == 2;
    let _ = write!(out, "{:>10}  {:<14}  {:<14}  {:>10}", "percentile", "scheme", "receiver", "sinr_db");
    if paired {
        out.push_str("  gap_db");
    }
    out.push('\n');
    let Some(first) = summaries.first() else {
        return out;
    };
    for (i, &(p, _)) in first.percentiles.iter().enumerate() {
        for (j, s) in summaries.iter().enumerate() {
            let value = s.percentiles[i].1;
            let _ = write!(out, "{:>10.2}  {:<14}  {:<14}  {:>10.3}", p, s.scheme, s.receiver, value);
            if paired && j == 1 {
                let _ = write!(out, "  {:+.3}", value - summaries[0].percentiles[i].1);
            }
            out.push('\n');
        }
    }
    out
}

// A JSON string literal is also a valid Python string literal.
fn py_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization cannot fail")
}

/// Python/matplotlib script that draws every scheme's CDF from the sample CSV
/// `samples_file` (resolved next to the script) and saves `image_file`.
pub fn plot_script(samples_file: &str, image_file: &str) -> String {
    format!(
        r#"import csv
import os
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
SAMPLES = {samples}
IMAGE = {image}


def load(path):
    groups = defaultdict(list)
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            groups[(row["scheme"], row["receiver"])].append(float(row["sinr_db"]))
    return groups


def main():
    samples = sys.argv[1] if len(sys.argv) > 1 else os.path.join(HERE, SAMPLES)
    groups = load(samples)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for (scheme, receiver), values in sorted(groups.items()):
        values.sort()
        n = len(values)
        probs = [(i + 1) / n for i in range(n)]
        ax.step(values, probs, where="post", label=f"{{scheme}} ({{receiver}})")
    ax.set_xlabel("Effective layer SINR (dB)")
    ax.set_ylabel("CDF")
    ax.set_ylim(0, 1)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(os.path.join(os.path.dirname(os.path.abspath(samples)), IMAGE), dpi=150)


if __name__ == "__main__":
    main()
"#,
        samples = py_string(samples_file),
        image = py_string(image_file),
    )
}

/// Sidecar path `<dir>/<stem><suffix>` next to the sample file.
pub fn sidecar(samples_path: &Path, suffix: &str) -> PathBuf {
    let stem = samples_path
        .file_stem()
        .map_or_else(|| "samples".into(), |s| s.to_string_lossy().into_owned());
    samples_path.with_file_name(format!("{stem}{suffix}"))
}
