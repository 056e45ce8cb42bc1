//! `zonofit` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 unreadable or invalid input,
//! 3 solver failure, 4 perturbation budget exhausted, 5 locality violated.

mod bench;
mod commands;
mod manifest;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zonofit::Error;

#[derive(Parser, Debug)]
#[command(name = "zonofit", version, about = "Fit a fixed-rank zonotope to a polytope in Hausdorff distance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hausdorff distance between a polytope and a zonotope.
    Distance {
        polytope: PathBuf,
        zonotope: PathBuf,
        /// Distance between vertex sets only.
        #[arg(long)]
        coarse: bool,
    },
    /// Run the descent from a warmstart, a random or a given zonotope.
    Optimize(OptimizeArgs),
    /// Feasibility cone at a configuration.
    Cone {
        polytope: PathBuf,
        zonotope: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Exact)]
        objective: ObjectiveArg,
    },
    /// Initial zonotope for a polytope.
    Warmstart {
        polytope: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Grid refinement levels for the planar center search.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Warmstart against random starts on random polytopes.
    Bench(bench::BenchArgs),
    /// Re-run an optimize manifest and check the trace matches.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Conservative,
    Aggressive,
    Random,
    Hybrid,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Auto,
    Random,
    File,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Exact,
    Coarse,
}

impl From<ObjectiveArg> for zonofit::cone::Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Exact => Self::Exact,
            ObjectiveArg::Coarse => Self::Coarse,
        }
    }
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    pub polytope: PathBuf,
    #[arg(long)]
    pub rank: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Stop once the distance is at most this.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    /// Iteration at which the hybrid rule turns conservative.
    #[arg(long)]
    pub switch_at: Option<usize>,
    /// Overridden by ZONOFIT_SEED when set.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = InitArg::Auto)]
    pub warmstart: InitArg,
    /// Starting zonotope for `--warmstart file`.
    #[arg(long)]
    pub init: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub objective: Option<ObjectiveArg>,
    #[arg(long)]
    pub cone_fallback: bool,
    /// JSON object with any DescentConfig fields; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Final zonotope JSON; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// SVG drawing of the result, planar inputs only.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Defaults to `<out>.manifest.json` when `--out` is given.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

/// Command-line misuse found after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Unreadable or malformed input file.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    if err.downcast_ref::<InputError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::Parse(_)
            | Error::InvalidInput(_)
            | Error::DegeneratePolytope { .. }
            | Error::DimensionMismatch { .. },
        ) => 2,
        Some(Error::PerturbationBudgetExceeded(_)) => 4,
        Some(Error::LocalityViolation(_)) => 5,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Distance { polytope, zonotope, coarse } => commands::distance(&polytope, &zonotope, coarse),
        Command::Optimize(args) => commands::optimize(&args),
        Command::Cone { polytope, zonotope, objective } => commands::cone(&polytope, &zonotope, objective.into()),
        Command::Warmstart { polytope, rank, seed, depth } => commands::warmstart(&polytope, rank, seed, depth),
        Command::Bench(args) => bench::run(&args),
        Command::Replay { manifest, trace } => commands::replay(&manifest, trace.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
