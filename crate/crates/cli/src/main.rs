//! `tribell`: generate, evaluate and verify tight Bell inequality catalogs.
//!
//! Exit codes: 0 success, 1 property failure, 2 usage or I/O error.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Largest sampling cap accepted without `--exhaustive`.
pub const MAX_SAMPLE_CAP: usize = 10_000;

#[derive(Parser, Debug)]
#[command(name = "tribell", version, about = "Tight Bell inequalities for dichotomic multi-setting scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct ScenarioArgs {
    /// Number of parties.
    #[arg(long, default_value_t = 2)]
    parties: usize,
    /// Settings per party (2 or 3).
    #[arg(long, default_value_t = 3)]
    settings: usize,
}

#[derive(Args, Debug, Clone, Copy)]
struct EnumArgs {
    /// Seed for every sampled step.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sign functions to sample beyond two parties.
    #[arg(long, default_value_t = 256)]
    cap: usize,
    /// Enumerate every admissible sign function, whatever the party count.
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the vertex list of the correlation polytope.
    Vertices {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write admissible sign functions.
    Signfns {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build, deduplicate and certify the inequality catalog.
    Generate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a catalog on a correlation tensor.
    Evaluate {
        /// Tensor JSON: {"scenario": {...}, "values": ["p/q", ...]}.
        #[arg(long = "in")]
        input: PathBuf,
        /// Catalog to use instead of a freshly generated one.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[command(flatten)]
        enumeration: EnumArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suite; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        /// Catalog to verify instead of a freshly generated one.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Random bases per sampled geometric check.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Random tensors for the completeness check.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Where to write one JSON line per completeness trial.
        #[arg(long)]
        trials_out: Option<PathBuf>,
        /// Where to write one JSON line per check.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduce one-index-per-party sign functions to two settings.
    Reduce {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        enumeration: EnumArgs,
        /// Sign functions to reduce instead of every eligible one.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relabel the two-party catalog as full-data constraints.
    ChLift {
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide polytope membership of a tensor with a witness.
    Member {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
