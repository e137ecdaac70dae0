use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Synthesize and check Lyapunov functions with an SMT solver.
#[derive(Debug, Parser)]
#[command(name = "lyapsyn", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the counterexample-guided synthesis loop.
    Synth(SynthArgs),
    /// Check a concrete candidate.
    Check(CheckArgs),
    /// Print the relaxed deficits and the shape of every solver query.
    Explain(ExplainArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct SolverArgs {
    /// Solver command line; overrides LYAPSYN_SOLVER.
    #[arg(long)]
    pub solver_cmd: Option<String>,
    /// Per-query timeout in milliseconds.
    #[arg(long)]
    pub timeout_ms: Option<u64>,
    /// Require a strictly negative deficit.
    #[arg(long)]
    pub asymptotic: bool,
}

#[derive(Debug, Args, Clone)]
pub struct SynthArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub max_iter: Option<u32>,
    /// Keep only the most recent K counterexamples (0 keeps all).
    #[arg(long)]
    pub window: Option<u32>,
    /// Comma-separated rationals, e.g. "-1,1/2".
    #[arg(long, allow_hyphen_values = true)]
    pub initial_params: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Artifact directory [default: runs/<file stem>].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Clone)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Parameter assignment, e.g. "p1=1/2,p2=1/4".
    #[arg(long, allow_hyphen_values = true)]
    pub candidate: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also write the region scripts here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Clone)]
pub struct ExplainArgs {
    pub file: PathBuf,
}
