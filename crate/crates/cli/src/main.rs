//! `qfern` command-line front end.
//!
//! Exit codes: 0 success, 2 usage or invalid parameter, 3 I/O or parse
//! failure, 4 graph-structure error (disconnected, no candidate edges),
//! 1 numerical failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qfern::rewire::{CandidatePolicy, GradientMode};

#[derive(Debug, Parser)]
#[command(
    name = "qfern",
    version,
    about = "Spectral bottleneck analysis, rewiring and synchronization checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a seeded random DAG and write it as a graph file.
    Generate(GenerateArgs),
    /// Report lambda_2, the Fiedler vector, the Cheeger constant and R_total.
    Analyze(AnalyzeArgs),
    /// Run the gradient step and the edge-swap loop.
    Rewire(RewireArgs),
    /// Check the synchronization condition, flag desync pairs, add a stabilizer.
    Sync(SyncArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(short = 'n', long)]
    pub nodes: usize,
    #[arg(short = 'p', long)]
    pub prob: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'o', long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub graph: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(short = 'o', long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Signed,
    Abs,
}

impl From<ModeArg> for GradientMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Signed => GradientMode::Signed,
            ModeArg::Abs => GradientMode::Abs,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CandidatesArg {
    Cross,
    All,
}

impl From<CandidatesArg> for CandidatePolicy {
    fn from(c: CandidatesArg) -> Self {
        match c {
            CandidatesArg::Cross => CandidatePolicy::CrossPartition,
            CandidatesArg::All => CandidatePolicy::AllNonEdges,
        }
    }
}

#[derive(Debug, Args)]
pub struct RewireArgs {
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Signed)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 50)]
    pub iters: usize,
    /// Consecutive rejected swaps before stopping; 0 disables.
    #[arg(long, default_value_t = 20)]
    pub patience: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = CandidatesArg::Cross)]
    pub candidates: CandidatesArg,
    #[arg(short = 'o', long)]
    pub out_prefix: String,
}

#[derive(Debug, Args)]
pub struct SyncArgs {
    pub graph: PathBuf,
    /// Natural frequencies, one per line in node order.
    #[arg(
        long,
        conflicts_with = "omega_seed",
        required_unless_present = "omega_seed"
    )]
    pub omega: Option<PathBuf>,
    /// Draw frequencies uniformly from [-1, 1] and center them.
    #[arg(long)]
    pub omega_seed: Option<u64>,
    #[arg(long, conflicts_with = "threshold")]
    pub quantile: Option<f64>,
    /// Absolute resistance threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Stabilizer fan-out.
    #[arg(short = 'k', long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 1.0)]
    pub weight: f64,
    /// Also integrate the oscillator model and record its lock verdict.
    #[arg(long)]
    pub simulate: bool,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 200.0)]
    pub t_max: f64,
    #[arg(short = 'o', long)]
    pub out_prefix: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("qfern: {e:#}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Generate(a) => commands::generate(&a),
        Command::Analyze(a) => commands::analyze(&a),
        Command::Rewire(a) => commands::rewire(&a),
        Command::Sync(a) => commands::sync(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfern: {e:#}");
            ExitCode::from(output::exit_code(&e))
        }
    }
}

/// `QFERN_THREADS` caps the global rayon pool; results do not depend on it.
fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("QFERN_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        output::usage(format!(
            "QFERN_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}
