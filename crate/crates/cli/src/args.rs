use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "igk",
    version,
    about = "Fisher tensors, Markov kernels and information loss on finite sample spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<String>,
    /// Relative tolerance for domination checks on pushed measures.
    #[arg(long, default_value_t = 0.0)]
    pub dom_tol: f64,
}

/// Where the parameter points come from.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Points {
    /// A parameter point as comma-separated coordinates; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Vec<String>,
    /// A grid `a:b:n` of n evenly spaced values from a to b, in every
    /// parameter coordinate.
    #[arg(long, allow_hyphen_values = true)]
    pub xi_grid: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Directions {
    /// A tangent direction as comma-separated components; repeatable.
    /// Defaults to the coordinate basis.
    #[arg(long, allow_hyphen_values = true)]
    pub direction: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pullback tensors τⁿ, the Fisher metric (n = 2) or the Amari–Chentsov tensor (n = 3).
    Tensor(TensorArgs),
    /// Push a measure, or a model at one parameter, through a kernel.
    Pushforward(PushforwardArgs),
    /// Information loss under a kernel, or a seeded random sweep of it.
    Infoloss(InfolossArgs),
    /// Whether a kernel is sufficient for a model over a parameter grid.
    Sufficient(SufficientArgs),
    /// Fisher–Neyman factorization check for a statistic.
    Factorize(FactorizeArgs),
    /// Split a kernel into a congruent kernel and a statistic.
    DecomposeKernel(DecomposeArgs),
    /// Sampled continuity of the k-norm of the logarithmic derivative.
    CheckIntegrability(IntegrabilityArgs),
    /// Reproduce one of the worked examples.
    PaperExample(ExampleArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TensorArgs {
    /// `builtin:NAME` or a model JSON file.
    #[arg(long)]
    pub model: String,
    /// Tensor order n ≥ 1.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// The parameter point, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    #[command(flatten)]
    pub directions: Directions,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PushforwardArgs {
    /// Kernel or statistic JSON file, or `builtin:identity`,
    /// `builtin:collapse`, `builtin:project-first`.
    #[arg(long)]
    pub kernel: String,
    /// Measure JSON file to push.
    #[arg(long, conflicts_with = "model")]
    pub measure: Option<String>,
    /// Model to evaluate at `--xi` and push.
    #[arg(long, requires = "xi")]
    pub model: Option<String>,
    /// The parameter point for `--model`, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    /// Signed measure JSON file; its image's density with respect to the
    /// image of the measure is reported.
    #[arg(long)]
    pub signed: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InfolossArgs {
    /// `builtin:NAME` or a model JSON file.
    #[arg(long, required_unless_present = "random")]
    pub model: Option<String>,
    /// Kernel or statistic JSON file, or a builtin statistic.
    #[arg(long, required_unless_present = "random")]
    pub kernel: Option<String>,
    /// Orders k ≥ 1, comma-separated.
    #[arg(long, default_value = "2")]
    pub k: String,
    #[command(flatten)]
    pub points: Points,
    #[command(flatten)]
    pub directions: Directions,
    /// Run N random instances (positive models on at most 8 atoms, kernels
    /// to at most 6 atoms) instead of a given model.
    #[arg(long, conflicts_with_all = ["model", "kernel"])]
    pub random: Option<usize>,
    /// Master seed of the random sweep.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SufficientArgs {
    /// `builtin:NAME` or a model JSON file.
    #[arg(long)]
    pub model: String,
    /// Kernel or statistic JSON file, or a builtin statistic.
    #[arg(long)]
    pub kernel: String,
    /// Order 1 < k < ∞.
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    /// Largest loss still counted as zero.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub points: Points,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FactorizeArgs {
    /// `builtin:NAME` or a model JSON file.
    #[arg(long)]
    pub model: String,
    /// A statistic: a statistic JSON file or `builtin:identity`,
    /// `builtin:collapse`, `builtin:project-first`.
    #[arg(long)]
    pub statistic: String,
    #[command(flatten)]
    pub points: Points,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecomposeArgs {
    /// Kernel or statistic JSON file.
    #[arg(long)]
    pub kernel: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IntegrabilityArgs {
    /// `builtin:NAME` or a model JSON file.
    #[arg(long)]
    pub model: String,
    /// Order k ≥ 1 of the norm.
    #[arg(long, default_value_t = 2.0)]
    pub k: f64,
    /// Largest relative jump between neighbouring grid points.
    #[arg(long, default_value_t = 0.1)]
    pub tol: f64,
    #[command(flatten)]
    pub points: Points,
    #[command(flatten)]
    pub directions: Directions,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Example {
    #[value(name = "ex4.1")]
    #[serde(rename = "ex4.1")]
    Ex41,
    #[value(name = "ex-suff")]
    #[serde(rename = "ex-suff")]
    ExSuff,
    #[value(name = "bernoulli")]
    #[serde(rename = "bernoulli")]
    Bernoulli,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExampleArgs {
    #[arg(value_enum)]
    pub example: Example,
    /// Parameter values, comma-separated (ex4.1 and bernoulli).
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<String>,
    /// Parameter grid `a:b:n` (ex-suff).
    #[arg(long, allow_hyphen_values = true)]
    pub xi_grid: Option<String>,
    /// Orders k, comma-separated (ex-suff).
    #[arg(long, default_value = "2")]
    pub k: String,
    /// Grid cells of the ex4.1 sample space.
    #[arg(long, default_value_t = 20_000)]
    pub grid_points: usize,
    /// Cells of the ex-suff sample space along the statistic's coordinate
    /// (even).
    #[arg(long, default_value_t = 200)]
    pub s_cells: usize,
    /// Cells of the ex-suff sample space along the other coordinate.
    #[arg(long, default_value_t = 100)]
    pub t_cells: usize,
    /// Largest loss still counted as zero (ex-suff).
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub common: Common,
}
