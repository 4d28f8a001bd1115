use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "linfit", version, about = "Minimax regression, outlier removal and benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a problem CSV and print the coefficients and level.
    Fit(FitArgs),
    /// Remove outliers from a problem CSV.
    Remove(RemoveArgs),
    /// Time the full and column-generation solvers on generated instances.
    Bench(BenchArgs),
    /// Write synthetic data sets.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Classify query vectors against a gallery directory.
    Classify(ClassifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Full,
    Cg,
}

impl From<SolverArg> for linfit::Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Full => linfit::Solver::Full,
            SolverArg::Cg => linfit::Solver::ColumnGeneration,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FitMode {
    LinfFull,
    LinfCg,
    Ls,
}

/// Column-generation iteration cap.
#[derive(Debug, Args)]
pub struct CgArgs {
    #[arg(long, default_value_t = 100)]
    pub lmax: usize,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Problem CSV with header x1,...,xd,y.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = FitMode::LinfCg)]
    pub mode: FitMode,
    /// Ridge parameter for `--mode ls`.
    #[arg(long, default_value_t = 0.0)]
    pub ridge: f64,
    #[command(flatten)]
    pub cg: CgArgs,
    /// Write the summary here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RemoveArgs {
    pub input: PathBuf,
    #[arg(long, short = 'p')]
    pub outlier_fraction: f64,
    #[arg(long, value_enum, default_value_t = SolverArg::Cg)]
    pub solver: SolverArg,
    #[command(flatten)]
    pub cg: CgArgs,
    /// Count every deleted support row, ignoring remedied rows.
    #[arg(long)]
    pub gross: bool,
    /// Per-round report CSV.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Problem CSV holding only the kept rows.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated problem sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [20, 50, 100, 200, 500, 1000, 2000, 10000])]
    pub sizes: Vec<usize>,
    /// Comma-separated dimensions.
    #[arg(long, value_delimiter = ',', default_values_t = [2])]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Base seed; repetition `r` of every cell uses `seed + r`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub cg: CgArgs,
    /// Timing records CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Contaminated linear data as a problem CSV.
    Line(GenLineArgs),
    /// Noisy ellipse with box outliers as an x,y,is_outlier CSV.
    Ellipse(GenEllipseArgs),
    /// Class gallery directory, optionally with occluded queries.
    Gallery(GenGalleryArgs),
}

#[derive(Debug, Args)]
pub struct GenLineArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Number of inliers; rows k..n are contaminated.
    #[arg(long, default_value_t = 70)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long)]
    pub two_sided: bool,
    /// Draw every column at random instead of ending with an intercept column.
    #[arg(long)]
    pub no_intercept: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenEllipseArgs {
    #[arg(long, default_value_t = 100)]
    pub n_inliers: usize,
    #[arg(long, default_value_t = 30)]
    pub n_outliers: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.0], allow_negative_numbers = true)]
    pub center: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [30.0, 20.0])]
    pub semi_axes: Vec<f64>,
    /// Rotation of the first semi-axis in radians.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rotation: f64,
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 1.2)]
    pub box_scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenGalleryArgs {
    #[arg(long, default_value_t = 10)]
    pub classes: usize,
    #[arg(long, default_value_t = 3)]
    pub templates: usize,
    #[arg(long, default_value_t = 300)]
    pub len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Gallery directory, one CSV per class.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of occluded queries to write with `--queries-out`.
    #[arg(long, default_value_t = 100)]
    pub queries: usize,
    /// Fraction of each query covered by the occluding block.
    #[arg(long, default_value_t = 0.3)]
    pub occlusion: f64,
    #[arg(long)]
    pub queries_out: Option<PathBuf>,
    /// True class labels of the queries, one per line.
    #[arg(long)]
    pub labels_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub gallery: PathBuf,
    /// Headerless CSV, one query vector per line.
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long, short = 'p', default_value_t = 0.3)]
    pub outlier_fraction: f64,
    #[arg(long, value_enum, default_value_t = SolverArg::Full)]
    pub solver: SolverArg,
    #[command(flatten)]
    pub cg: CgArgs,
    /// Results CSV instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
