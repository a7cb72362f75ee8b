use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 20_160_512;

#[derive(Debug, Parser)]
#[command(name = "fourpt", version, about = "Four-point block detection for bipartite graphs")]
pub struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the four-point test on a TSV edge list.
    Fourpoint(FourpointArgs),
    /// Write a synthetic graph or permutation.
    Generate(GenerateArgs),
    /// Compute a vertex ordering and write it as TSV.
    Order(OrderArgs),
    /// Likelihood-ratio and related statistics.
    Lrstat(LrstatArgs),
    /// Time the four-point test and natural order over growing sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Random,
}

impl SeedArg {
    pub fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(s) => s,
            SeedArg::Random => rand::random(),
        }
    }
}

fn parse_seed(s: &str) -> Result<SeedArg, String> {
    if s == "random" {
        return Ok(SeedArg::Random);
    }
    s.parse()
        .map(SeedArg::Fixed)
        .map_err(|_| format!("expected an unsigned integer or 'random', got '{s}'"))
}

#[derive(Debug, Args)]
pub struct SeedOpt {
    /// RNG seed, or `random` for a fresh one (recorded in the manifest).
    #[arg(long, value_parser = parse_seed, default_value_t = SeedArg::Fixed(DEFAULT_SEED))]
    pub seed: SeedArg,
}

impl std::fmt::Display for SeedArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeedArg::Fixed(s) => write!(f, "{s}"),
            SeedArg::Random => f.write_str("random"),
        }
    }
}

#[derive(Debug, Args)]
pub struct InputOpt {
    /// TSV edge list (`left<TAB>right` per line); `-` reads stdin.
    pub input: PathBuf,

    /// Collapse repeated edges instead of keeping them as a multigraph.
    #[arg(long)]
    pub dedup: bool,

    /// Index vertices by label value (numeric if possible) rather than by
    /// first appearance, so the given order follows the labels.
    #[arg(long)]
    pub sort_labels: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderMethod {
    Given,
    Natural,
    Mindeg,
}

impl OrderMethod {
    pub fn name(self) -> &'static str {
        match self {
            OrderMethod::Given => "given",
            OrderMethod::Natural => "natural",
            OrderMethod::Mindeg => "mindeg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L2,
    L1,
}

#[derive(Debug, Args)]
pub struct PowerOpt {
    /// Power-method stopping tolerance.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,

    /// Iteration cap as a multiple of the estimated diameter.
    #[arg(long, default_value_t = 2.0)]
    pub max_iter_factor: f64,

    #[arg(long, value_enum, default_value_t = NormArg::L2)]
    pub norm: NormArg,
}

#[derive(Debug, Args)]
pub struct FourpointArgs {
    #[command(flatten)]
    pub input: InputOpt,
    #[command(flatten)]
    pub seed: SeedOpt,

    #[arg(long, default_value_t = 3)]
    pub repeats: usize,

    #[arg(long, value_enum, default_value_t = OrderMethod::Given)]
    pub order: OrderMethod,

    /// Learn the order on a random half of the edges and test the other half.
    #[arg(long)]
    pub split: bool,

    #[command(flatten)]
    pub power: PowerOpt,

    /// Write results and manifest as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,

    /// Write the pattern histogram of the first repeat as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator name (see `--list`).
    #[arg(required_unless_present = "list")]
    pub model: Option<String>,

    /// Generator parameter, repeatable: `--set n=307 --set gamma=0.048`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub params: Vec<String>,

    #[command(flatten)]
    pub seed: SeedOpt,

    /// Output path for the edge list or permutation; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,

    /// Write planted blocks as JSON, for models that have them.
    #[arg(long)]
    pub truth: Option<PathBuf>,

    #[arg(long)]
    pub manifest: Option<PathBuf>,

    /// List generators and exit.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    #[command(flatten)]
    pub input: InputOpt,
    #[command(flatten)]
    pub seed: SeedOpt,

    #[arg(long, value_enum, default_value_t = OrderMethod::Natural)]
    pub method: OrderMethod,

    #[command(flatten)]
    pub power: PowerOpt,

    /// Output prefix: writes PREFIX.left.tsv, PREFIX.right.tsv and PREFIX.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LrTest {
    Lr,
    Variance,
    DegreeAssoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LrModel {
    /// Marginal rates, computed from the joint degree matrix.
    Grouped,
    /// Marginal rates, summed cell by cell.
    Marginal,
    /// A single rate N/(nm).
    Constant,
}

#[derive(Debug, Args)]
pub struct LrstatArgs {
    #[command(flatten)]
    pub input: InputOpt,

    #[arg(long, value_enum, default_value_t = LrTest::Lr)]
    pub test: LrTest,

    /// Rate model for `--test lr`.
    #[arg(long, value_enum, default_value_t = LrModel::Grouped)]
    pub model: LrModel,

    /// Test size for `--test degree-assoc`.
    #[arg(long, default_value_t = 0.05)]
    pub size: f64,

    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Subsample this edge list instead of generating half-edge graphs.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Edge counts, ascending.
    #[arg(long, value_delimiter = ',', default_value = "100000,200000,400000,800000")]
    pub sizes: Vec<usize>,

    /// Timing repetitions per size; the minimum is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,

    /// Skip the natural-order timing.
    #[arg(long)]
    pub no_natural: bool,

    #[command(flatten)]
    pub seed: SeedOpt,

    /// CSV output path; `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}
