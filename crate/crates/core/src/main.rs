use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use slnr_core::channel::{ReceiverKind, Scheme};
use slnr_core::cli::{execute, parse_config, Overrides};
use slnr_core::Error;

/// Monte Carlo campaigns for per-user and per-layer SLNR precoding.
#[derive(Debug, Parser)]
#[command(name = "slnr-sim", version)]
struct Args {
    /// JSON scenario document.
    #[arg(long)]
    config: PathBuf,
    /// original_slnr or layer_slnr.
    #[arg(long)]
    scheme: Option<Scheme>,
    /// matched_filter or mmse.
    #[arg(long)]
    receiver: Option<ReceiverKind>,
    #[arg(long)]
    drops: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Feedback iterations after the bootstrap solve.
    #[arg(long)]
    iters: Option<usize>,
    /// Sample CSV path; sidecar files are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run both schemes on identical channels and write per-layer deltas.
    #[arg(long)]
    compare: bool,
}

fn run(args: Args) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", args.config.display())))?;
    let parsed = parse_config(&text)?.with_overrides(Overrides {
        scheme: args.scheme,
        receiver: args.receiver,
        drops: args.drops,
        seed: args.seed,
        feedback_iters: args.iters,
        output_path: args.out,
    })?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    let written = execute(&parsed, args.compare, &mut std::io::stdout().lock())?;
    for f in written.files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("config-error: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = e.to_string().replace('\n', " ");
            eprintln!("{}: {line}", e.category());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
