//! Command-line argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tracecrit::Method;

/// Independence testing between two blocks of jointly observed variables:
/// a standardized trace statistic with a normal reference distribution,
/// permutation-calibrated classical comparators, Monte-Carlo size/power
/// harnesses, and all-pairs dependence screening.
///
/// All results are emitted as a single JSON object on stdout; progress and
/// summaries go to stderr. Exit codes: 0 success, 1 failed statistical
/// check, 2 usage error, 3 data error, 4 degenerate or unavailable
/// statistic.
#[derive(Debug, Parser)]
#[command(name = "tracecrit", version, propagate_version = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test independence between the leading and trailing column blocks of
    /// a CSV matrix (header row required).
    Test(TestArgs),
    /// Estimate empirical size or power of the tests on synthetic models.
    Simulate(SimulateArgs),
    /// Verify the quadratic kernel's moment identities by simulation.
    PsiCheck(PsiCheckArgs),
    /// Screen every pair of column groups for dependence and optionally
    /// score the predicted edge set against a reference network.
    Pairwise(PairwiseArgs),
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// CSV data matrix; the first row is a header, every later row one
    /// observation.
    #[arg(long)]
    pub data: PathBuf,

    /// Width of the first block: the leading `p1` columns form one vector,
    /// the remaining columns the other.
    #[arg(long)]
    pub p1: usize,

    /// Test method: tn, perm-tn, perm-wilks, perm-c1, or perm-c2.
    #[arg(long, default_value = "tn")]
    pub method: Method,

    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// Number of permutations for permutation-calibrated methods.
    #[arg(long, default_value_t = 199)]
    pub permutations: usize,

    /// RNG seed (defaults to the TRACECRIT_SEED environment variable,
    /// then 0).
    #[arg(long, env = "TRACECRIT_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// Independent standard-normal blocks.
    Null,
    /// Normal blocks coupled through shared latent coordinates with
    /// strength gamma.
    Mixture,
    /// The coupled model with standardized-gamma contamination added to
    /// every latent coordinate.
    Contaminated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// Sweep the coupling strength.
    Gamma,
    /// Sweep the second block's width.
    P2,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("preset").multiple(false))]
pub struct SimulateArgs {
    /// Synthetic model for the data-generating process.
    #[arg(long, value_enum, default_value_t = ModelKind::Null, conflicts_with = "preset")]
    pub model: ModelKind,

    /// First (narrow) block width.
    #[arg(long, default_value_t = 2, conflicts_with = "preset")]
    pub p1: usize,

    /// Second block width.
    #[arg(long, default_value_t = 10, conflicts_with = "preset")]
    pub p2: usize,

    /// Degrees of freedom n; each replication draws N = n + 1 observations.
    #[arg(long, default_value_t = 50, conflicts_with = "preset")]
    pub n: usize,

    /// Monte-Carlo replications per grid point.
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,

    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// Coupling strength for mixture/contaminated models.
    #[arg(long, default_value_t = 0.5, conflicts_with = "preset")]
    pub gamma: f64,

    /// Contamination weight for the contaminated model.
    #[arg(long, default_value_t = 2.0, conflicts_with = "preset")]
    pub theta: f64,

    /// Shape of the contaminating gamma distribution.
    #[arg(long = "shape-a", default_value_t = 3.0, conflicts_with = "preset")]
    pub shape_a: f64,

    /// RNG seed (defaults to the TRACECRIT_SEED environment variable,
    /// then 0).
    #[arg(long, env = "TRACECRIT_SEED")]
    pub seed: Option<u64>,

    /// Comma-separated methods to evaluate.
    #[arg(long, value_delimiter = ',', default_value = "tn", conflicts_with = "preset")]
    pub methods: Vec<Method>,

    /// Number of permutations for permutation-calibrated methods.
    #[arg(long, default_value_t = 199)]
    pub permutations: usize,

    /// Sweep one parameter over --grid instead of a single design point.
    #[arg(long, value_enum, requires = "grid", conflicts_with = "preset")]
    pub sweep: Option<SweepKind>,

    /// Comma-separated grid values for --sweep (integers for p2).
    #[arg(long, value_delimiter = ',', requires = "sweep")]
    pub grid: Vec<f64>,

    /// Directory reports are written into, created if missing: report.csv,
    /// report.json, and manifest.json (presets write one CSV per table or
    /// panel instead of report.*).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,

    /// JSON file holding a full simulation config (the same schema as the
    /// "config" object in report.json); conflicts with the design flags.
    #[arg(long, conflicts_with_all = [
        "model", "p1", "p2", "n", "gamma", "theta", "shape_a", "methods", "sweep", "grid",
        "preset",
    ])]
    pub config: Option<PathBuf>,

    /// Size grid on the normal null: all tests at the narrow second-block
    /// widths plus wide-block cells for the standardized statistic alone
    /// (27 cells).
    #[arg(long, group = "preset")]
    pub table1: bool,

    /// The size grid of --table1 under gamma contamination, at
    /// contamination weights 1/2 and 2 (54 cells).
    #[arg(long, group = "preset")]
    pub table2: bool,

    /// Power curves at (4, 30, n=50): coupling sweep 0..0.9, and
    /// second-block-width sweep 5..45 at coupling 0.5 (two CSVs).
    #[arg(long, group = "preset")]
    pub figure1: bool,

    /// The power curves of --figure1 under gamma contamination, at
    /// contamination weights 1/2 and 2 (four CSVs).
    #[arg(long, group = "preset")]
    pub figure2: bool,

    /// Run presets at the reference budget of 1e5 replications per cell
    /// (hours of CPU time) instead of the default --reps.
    #[arg(long, conflicts_with = "reps", requires = "preset")]
    pub full_budget: bool,
}

#[derive(Debug, Args)]
pub struct PsiCheckArgs {
    /// Vector length (degrees of freedom) for the kernel draws.
    #[arg(long, default_value_t = 50)]
    pub n: usize,

    /// Monte-Carlo draws (at least 1e4).
    #[arg(long, default_value_t = 100_000)]
    pub reps: usize,

    /// RNG seed (defaults to the TRACECRIT_SEED environment variable,
    /// then 0).
    #[arg(long, env = "TRACECRIT_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct PairwiseArgs {
    /// CSV data matrix; the first row is a header, every later row one
    /// observation.
    #[arg(long)]
    pub data: PathBuf,

    /// CSV layout file with a header row and `name,width` rows assigning
    /// consecutive columns to named groups.
    #[arg(long)]
    pub layout: PathBuf,

    /// Optional CSV edge list (header row, then `a,b` rows) of true
    /// dependencies; enables precision/recall/F scoring.
    #[arg(long)]
    pub truth: Option<PathBuf>,

    /// Significance level per pair.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// Test method applied to every pair.
    #[arg(long, default_value = "perm-tn")]
    pub method: Method,

    /// Number of permutations for permutation-calibrated methods.
    #[arg(long, default_value_t = 199)]
    pub permutations: usize,

    /// RNG seed (defaults to the TRACECRIT_SEED environment variable,
    /// then 0).
    #[arg(long, env = "TRACECRIT_SEED")]
    pub seed: Option<u64>,
}
