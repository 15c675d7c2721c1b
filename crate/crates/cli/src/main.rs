//! `mecke`: sample random measures, tabulate exact moments, verify the
//! Mecke-type identities and run fixed-point trajectories.
//!
//! Exit status is 0 when every check passes, 1 on a statistical failure and
//! 2 on a configuration or I/O error. Output is a pure function of the
//! configuration and seed; the thread count only changes how long it takes.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mecke_core::fixedpoint::InitialLaw;
use mecke_core::mecke::Identity;

use config::{Format, SampleKind};

#[derive(Parser, Debug)]
#[command(
    name = "mecke",
    version,
    about = "Random measures on [0, 1] and their integral identities"
)]
struct Cli {
    /// JSON run configuration. Flags given on the command line take
    /// precedence over its fields; its `command` field selects the
    /// subcommand when none is given.
    #[arg(long, global = true, value_name = "JSON")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw random measures (or Dirichlet vectors) and write their atoms.
    Sample(SampleArgs),
    /// Exact Dirichlet moments next to the quadrature oracle.
    Moments(MomentsArgs),
    /// Check selected identities; exit status reflects the verdict.
    Verify(VerifyArgs),
    /// Iterate the convex-step operator over an ensemble of chains.
    Fixedpoint(FixedpointArgs),
    /// The full default identity suite on the uniform intensity.
    Suite(SuiteArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Default)]
struct OutputArgs {
    /// Seed of the random stream, decimal or `0x` hex
    /// [default: 0x4d45434b45002017].
    #[arg(long, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Worker threads; the output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// The intensity `σ = β · density`.
#[derive(Args, Debug, Default)]
struct SigmaArgs {
    /// Total mass β of the intensity.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// `uniform`, or `table:<path>` for a CSV with columns
    /// `lower,upper,density` describing a piecewise-constant density
    /// (rescaled to integrate to one).
    #[arg(long, value_name = "SPEC")]
    density: Option<String>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// What to sample.
    #[arg(long, value_enum)]
    kind: Option<SampleKind>,
    #[command(flatten)]
    sigma: SigmaArgs,
    /// Dirichlet parameters for `--kind dirichlet`, comma separated.
    #[arg(long, value_name = "LIST")]
    alpha: Option<String>,
    /// Mark cutoff ε for `--kind gamma-levy` [default: 1e-4].
    #[arg(long, allow_negative_numbers = true)]
    levy_cutoff: Option<f64>,
    /// Number of draws [default: 1000].
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    /// Dirichlet parameters, comma separated rationals (`1/2,3/2`).
    #[arg(long, value_name = "LIST")]
    alpha: Option<String>,
    /// Weight vector `s`, comma separated rationals [default: 1,0,…].
    #[arg(long, value_name = "LIST")]
    s: Option<String>,
    /// Highest moment order [default: 5].
    #[arg(long)]
    max_order: Option<usize>,
    /// Gauss–Jacobi nodes per axis for the oracle [default: 256].
    #[arg(long)]
    resolution: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Identity to check; repeat for several [default: all].
    #[arg(long)]
    identity: Vec<Identity>,
    /// Total mass of the intensity [default: 0.5, 1 and 2].
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// `uniform` or `table:<path>`, as for `sample`.
    #[arg(long, value_name = "SPEC")]
    density: Option<String>,
    /// Samples per side [default: 100000].
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct FixedpointArgs {
    /// `delta-half`, `uniform:<m>` or `df` [default: delta-half].
    #[arg(long, value_name = "LAW")]
    initial_law: Option<InitialLaw>,
    /// Operator steps [default: 200].
    #[arg(long)]
    iterates: Option<usize>,
    /// Number of chains [default: 10000].
    #[arg(long)]
    ensemble: Option<usize>,
    /// Partition breakpoints, comma separated, 2 or 3 cells [default: 0,0.5,1].
    #[arg(long, value_name = "LIST")]
    partition: Option<String>,
    #[command(flatten)]
    sigma: SigmaArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SuiteArgs {
    /// Samples per side [default: 100000].
    #[arg(long)]
    samples: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_seed(text: &str) -> Result<u64, String> {
    match text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => text.parse(),
    }
    .map_err(|e| format!("{text:?} is not a 64-bit seed: {e}"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("mecke: {e}");
            ExitCode::from(2)
        }
    }
}
