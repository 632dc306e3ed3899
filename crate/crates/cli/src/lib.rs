//! Command-line pipelines over the `anchorlab` toolkit: synthetic data
//! generation, representation statistics, predictor evaluation and warp
//! augmentation, with JSONL datasets, CSV reports, SVG scatters and PPM
//! rasters as artifacts.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod cmd;
pub mod dataset;
mod error;
pub mod ppm;
pub mod report;
pub mod svg;

pub use error::{CliError, CliResult};

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "ANCHORLAB_SEED";

#[derive(Debug, Parser)]
#[command(name = "anchorlab", version, about = "Attachment-anchor grasp analysis pipelines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic JSONL dataset.
    Gen(GenArgs),
    /// Per-representation spread statistics, t-tests and scatter plots.
    Stats(StatsArgs),
    /// Cross-validated or group-held-out predictor evaluation.
    Eval(EvalArgs),
    /// Rotate adhesion vectors and warp annotations (and optionally rasters).
    Augment(AugmentArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Relative weights of cases 1, 2, 3.
    #[arg(long, default_value = "1,1,1")]
    pub mix: String,
    /// Angular noise (radians).
    #[arg(long, default_value_t = 0.05)]
    pub noise_angle: f64,
    /// Radial noise (fraction of the image diagonal).
    #[arg(long, default_value_t = 0.01)]
    pub noise_radius: f64,
    #[arg(long, default_value_t = 640, value_parser = clap::value_parser!(u32).range(1..))]
    pub width: u32,
    #[arg(long, default_value_t = 640, value_parser = clap::value_parser!(u32).range(1..))]
    pub height: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub dataset: PathBuf,
    /// Comma-separated subset of absolute, relative, anchor.
    #[arg(long, default_value = "absolute,relative,anchor")]
    pub kinds: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for the scatter SVGs (defaults to the report's directory).
    #[arg(long)]
    pub svg_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    pub dataset: PathBuf,
    /// Comma-separated predictor names, or `all`.
    #[arg(long, default_value = "all")]
    pub model: String,
    /// `kfold:K`, `group:<meta key>` or `surgeon-groups`.
    #[arg(long, default_value = "kfold:5")]
    pub split: String,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    pub dataset: PathBuf,
    /// Half-width of the uniform rotation range, radians (default π/18).
    #[arg(long, default_value_t = anchorlab::augment::DEFAULT_ALPHA_MAX)]
    pub alpha_max: f64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write source and warped sector rasters (PPM) into this directory.
    #[arg(long)]
    pub rasters: Option<PathBuf>,
}

/// Runs a parsed command, writing its summary to `log`.
pub fn run(cli: &Cli, log: &mut dyn std::io::Write) -> CliResult<()> {
    match &cli.command {
        Command::Gen(a) => cmd::gen(a, log),
        Command::Stats(a) => cmd::stats(a, log),
        Command::Eval(a) => cmd::eval(a, log),
        Command::Augment(a) => cmd::augment(a, log),
    }
}
