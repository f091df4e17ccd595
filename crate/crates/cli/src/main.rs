//! `rmlab`: command-line front end for the Reed-Muller workbench.
//!
//! Exit codes: 0 success, 2 invalid parameters, 3 resource cap exceeded,
//! 4 internal invariant violation.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rmlab::Error;

use config::ExperimentConfig;

#[derive(Parser, Debug)]
#[command(name = "rmlab", version, about = "Reed-Muller codes: spectra, MAP decoding and error bounds")]
struct Cli {
    /// Flat key = value experiment file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct CodeArgs {
    #[arg(short = 'n')]
    n: Option<u32>,
    #[arg(short = 'v')]
    v: Option<u32>,
}

#[derive(Args, Debug, Clone, Default)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// text, csv or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Length, dimension, rate and minimum distance of RM(n, v).
    CodeInfo {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact weight distribution as CSV, plus W(α) queries.
    Weights {
        #[command(flatten)]
        code: CodeArgs,
        /// Comma-separated normalized weights α.
        #[arg(long)]
        alpha: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact error probabilities and every audited inequality.
    Verify {
        #[command(flatten)]
        code: CodeArgs,
        /// bec:<ε>, bsc:<p>, table:<path> or awgn:<σ>:<t1>,<t2>,...
        #[arg(long)]
        channel: Option<String>,
        /// auto, generic or erasure.
        #[arg(long)]
        engine: Option<String>,
        /// Also compute the distance profile of the randomized block decoder.
        #[arg(long)]
        distances: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte-Carlo estimates next to exact values.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        /// A channel spec, or a family (bec, bsc) swept over --params.
        #[arg(long)]
        channel: Option<String>,
        #[arg(long)]
        params: Option<String>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Analytic bounds: pipeline, logbound, onset, window, tail, kl, cw, calibrate.
    Bounds {
        kind: BoundKind,
        #[command(flatten)]
        p: Box<BoundArgs>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact error probabilities and union bounds over codes and channel parameters.
    Sweep {
        /// Comma-separated n:v pairs; defaults to -n/-v.
        #[arg(long)]
        codes: Option<String>,
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        channel: Option<String>,
        #[arg(long)]
        params: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BoundKind {
    Pipeline,
    Logbound,
    Onset,
    Window,
    Tail,
    Kl,
    Cw,
    Calibrate,
}

#[derive(Args, Debug, Clone, Default)]
struct BoundArgs {
    #[arg(short = 'n')]
    n: Option<u32>,
    #[arg(short = 'v')]
    v: Option<u32>,
    #[arg(short = 'k')]
    k: Option<u64>,
    #[arg(long)]
    n_min: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    /// polynomial or stretched bit-error model.
    #[arg(long)]
    model: Option<String>,
    /// polynomial or refined window.
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    delta_prime: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    c_b: Option<f64>,
    #[arg(long)]
    ell: Option<u32>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    w: Option<String>,
    #[arg(long)]
    target: Option<f64>,
    #[arg(long)]
    start: Option<u32>,
    #[arg(long)]
    limit: Option<u32>,
    #[arg(long)]
    grid: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parameter(_) | Error::Parse(_) | Error::Io(_) => 2,
        Error::Capacity(_) => 3,
        Error::Inconsistent(_) => 4,
    }
}

fn run(cli: Cli) -> rmlab::Result<ExitCode> {
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Parameter("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Parameter(format!("cannot start thread pool: {e}")))?;
    }
    commands::dispatch(cli.command, &cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
