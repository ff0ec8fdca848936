use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hyperctrl", version, about = "Hypergraph controllability and minimum control nodes")]
pub struct Cli {
    /// Worker threads for the parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a named or random hypergraph as JSON.
    Generate(GenerateArgs),
    /// Node degrees from the adjacency tensor.
    Degrees(FileArgs),
    /// Rank verdict for unit inputs at the given nodes.
    Check(CheckArgs),
    /// Minimum number of control nodes, solved per connected component.
    Mcn(McnArgs),
    /// Hypergraph from time series by multi-correlation thresholding.
    Ingest(IngestArgs),
    /// Integrate the controlled dynamics with RK4 and print the trajectory.
    Simulate(SimulateArgs),
    /// Exact versus greedy timing and agreement table.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Chain,
    Ring,
    Star,
    Complete,
    #[value(name = "r-chain")]
    RChain,
    #[value(name = "r-ring")]
    RRing,
    #[value(name = "r-star")]
    RStar,
    Random,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Overlap size for the r-variants.
    #[arg(long)]
    pub r: Option<usize>,
    /// Probability of keeping each k-subset (random family).
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FileArgs {
    /// Hypergraph JSON file.
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Absolute singular-value cutoff; overrides HYPERCTRL_TOL.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub file: PathBuf,
    /// Comma-separated 1-based node labels; may be empty.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub controls: String,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TieBreakArg {
    Degree,
    Index,
    Random,
}

#[derive(Debug, Args)]
pub struct McnArgs {
    pub file: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    pub method: MethodArg,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long, value_enum, default_value_t = TieBreakArg::Degree)]
    pub tie_break: TieBreakArg,
    /// Seed for random tie-breaking.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest component the exact search accepts.
    #[arg(long, default_value_t = hyperctrl::mcn::DEFAULT_EXACT_LIMIT)]
    pub max_nodes: usize,
    /// Also list every minimum control set (exact method).
    #[arg(long)]
    pub all_witnesses: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// CSV with one row per channel.
    pub file: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    /// Correlation cutoff; defaults to 0.95 for order 3 and 0.99 for order 4.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// First row holds channel labels.
    #[arg(long)]
    pub has_header: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub file: PathBuf,
    /// Comma-separated initial state.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    /// Comma-separated 1-based control nodes.
    #[arg(long, default_value = "")]
    pub controls: String,
    /// CSV rows `t,u1,..,um`; each row holds until the next. Inputs are zero
    /// when omitted.
    #[arg(long)]
    pub input_schedule_file: Option<PathBuf>,
    #[arg(long = "T")]
    pub t_end: f64,
    #[arg(long, default_value_t = hyperctrl::simulate::DEFAULT_DT)]
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BenchFamily {
    Random,
    Complete,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub family: BenchFamily,
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Inclusive range `lo..hi`.
    #[arg(long)]
    pub n_range: String,
    /// Comma-separated seeds (random family).
    #[arg(long, default_value = "")]
    pub seeds: String,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[command(flatten)]
    pub tol: TolArgs,
}
