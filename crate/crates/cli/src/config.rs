use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use algpath::tracker::{PredictorKind, TrackOptions};

#[derive(Parser, Debug)]
#[command(name = "algpath", version, about = "Certified homotopy continuation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a homotopy from a target system and track every path.
    Solve(SolveArgs),
    /// Track given Moore boxes along a parametric system.
    Track(TrackArgs),
    /// Certify an approximate zero, or check and refine a Moore box.
    Certify(CertifyArgs),
    /// Run a built-in benchmark family and print step statistics.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HomotopyArg {
    TotalDegree,
    Newton,
    Parametric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PredictorArg {
    Hermite,
    Tangent,
    None,
}

impl From<PredictorArg> for PredictorKind {
    fn from(p: PredictorArg) -> Self {
        match p {
            PredictorArg::Hermite => PredictorKind::Hermite,
            PredictorArg::Tangent => PredictorKind::Tangent,
            PredictorArg::None => PredictorKind::None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    /// Hardware doubles with directed rounding.
    Fixed,
    /// Arbitrary-precision dyadics, starting at 53 bits.
    Adaptive,
}

/// Options shared by every command that tracks paths.
#[derive(Args, Debug, Clone)]
pub struct TrackingArgs {
    #[arg(long, value_enum, default_value = "hermite")]
    pub predictor: PredictorArg,

    #[arg(long, value_enum, default_value = "fixed")]
    pub precision: PrecisionArg,

    /// Worker threads; 0 uses one per core.
    #[arg(long, env = "ALGPATH_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Accepted steps per path before giving up.
    #[arg(long, default_value_t = 100_000)]
    pub max_steps: u64,

    /// Rejected step trials per path before giving up.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_trials: u64,

    /// Precision cap in bits for adaptive runs.
    #[arg(long, default_value_t = 4096)]
    pub max_bits: u32,
}

impl TrackingArgs {
    pub fn options(&self) -> TrackOptions {
        TrackOptions {
            max_steps: self.max_steps,
            max_rejected: self.max_trials,
            max_bits: self.max_bits,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Polynomial system file.
    #[arg(long)]
    pub system: PathBuf,

    #[arg(long, value_enum, default_value = "total-degree")]
    pub homotopy: HomotopyArg,

    /// Start points as JSON lines `{"point": [[re, im], ...]}`.
    #[arg(long)]
    pub start: Option<PathBuf>,

    /// Seed for the start-system multipliers and random Newton starts.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub tracking: TrackingArgs,

    /// Output file for the JSON lines (stdout if absent).
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// File receiving one JSON line per step trial.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrackArgs {
    /// Parametric system file (with a `param:` line).
    #[arg(long)]
    pub system: PathBuf,

    /// Moore boxes for `t = 0` as JSON lines `{"x": ..., "r": ..., "A": ..., "rho": ...}`.
    #[arg(long)]
    pub start: PathBuf,

    #[command(flatten)]
    pub tracking: TrackingArgs,

    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("candidate").required(true).args(["point", "start", "box"])))]
pub struct CertifyArgs {
    /// Polynomial system file (no parameter).
    #[arg(long)]
    pub system: PathBuf,

    /// Approximate zero as JSON `[[re, im], ...]`.
    #[arg(long)]
    pub point: Option<String>,

    /// File whose first line is a start point `{"point": ...}`.
    #[arg(long)]
    pub start: Option<PathBuf>,

    /// File holding a Moore box to check.
    #[arg(long = "box")]
    pub r#box: Option<PathBuf>,

    /// Refine the certified box to this contraction factor.
    #[arg(long)]
    pub refine: Option<f64>,

    #[arg(long, value_enum, default_value = "fixed")]
    pub precision: PrecisionArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Benchmark family: dense, structured or katsura.
    pub family: String,

    #[arg(long)]
    pub dim: Option<usize>,

    #[arg(long)]
    pub deg: Option<u32>,

    /// Number of Katsura variables.
    #[arg(long)]
    pub n: Option<usize>,

    /// Homotopy for structured systems.
    #[arg(long, value_enum, default_value = "newton")]
    pub homotopy: HomotopyArg,

    /// Track only this many total-degree paths, chosen at random.
    #[arg(long)]
    pub paths: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub tracking: TrackingArgs,

    #[arg(long, value_enum, default_value = "text")]
    pub format: FormatArg,
}
