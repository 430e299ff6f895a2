//! Argument definitions for the `sdfclass` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sdfclass_core::dataset::DistanceStat;
use sdfclass_core::estimate::EstimateStage;
use sdfclass_core::synth::LinearProblemKind;

#[derive(Debug, Parser)]
#[command(
    name = "sdfclass",
    version,
    about = "Binary classification by signed-distance-function reconstruction",
    after_help = "Exit codes: 0 success, 1 usage error, 2 data or contract error."
)]
pub struct Cli {
    /// TOML file of default flag values (explicit flags win; keys are the
    /// long flag names of the active subcommand).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Cap the worker-thread count for parallel sections.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset and write it as CSV.
    Gen(GenArgs),
    /// Compute signed-distance estimates for a labeled CSV dataset.
    Estimate(EstimateArgs),
    /// Fit a linear or kernel model and write it as JSON.
    Train(TrainArgs),
    /// Apply a saved model to a CSV of points.
    Predict(PredictArgs),
    /// Grid-search sigma and gamma by stratified cross-validation.
    Cv(CvArgs),
    /// Leave-one-out cross-validation accuracy of the kernel classifier.
    Loocv(LoocvArgs),
    /// Multi-trial benchmark on the linearly separable problems.
    BenchLinear(BenchLinearArgs),
    /// Multi-trial benchmark on the 4x4 checkerboard problem.
    BenchCheckerboard(BenchCheckerboardArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Uniform,
    Normal,
    Skewed,
    Checkerboard,
    CheckerboardGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LinearKindArg {
    Uniform,
    Normal,
    Skewed,
}

impl From<LinearKindArg> for LinearProblemKind {
    fn from(k: LinearKindArg) -> Self {
        match k {
            LinearKindArg::Uniform => LinearProblemKind::Uniform,
            LinearKindArg::Normal => LinearProblemKind::Normal,
            LinearKindArg::Skewed => LinearProblemKind::Skewed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Euclidean,
    /// Weighted Euclidean metric with absolute label-correlation weights.
    CorrelationWeighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StageArg {
    Initial,
    Midpoint,
}

impl From<StageArg> for EstimateStage {
    fn from(s: StageArg) -> Self {
        match s {
            StageArg::Initial => EstimateStage::Initial,
            StageArg::Midpoint => EstimateStage::MidpointRefined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaRuleArg {
    Mean,
    Rmsd,
}

impl From<SigmaRuleArg> for DistanceStat {
    fn from(r: SigmaRuleArg) -> Self {
        match r {
            SigmaRuleArg::Mean => DistanceStat::Mean,
            SigmaRuleArg::Rmsd => DistanceStat::Rmsd,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKindArg {
    Linear,
    Kernel,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Dataset family.
    #[arg(long, value_enum)]
    pub kind: GenKind,

    /// Sample count (all kinds except checkerboard-grid).
    #[arg(long)]
    pub m: Option<usize>,

    /// RNG seed (required for the randomized kinds).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Points per axis (checkerboard-grid only).
    #[arg(long)]
    pub resolution: Option<usize>,

    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Labeled input CSV.
    #[arg(long)]
    pub data: PathBuf,

    /// Label column name or 0-based index.
    #[arg(long, default_value = "label")]
    pub label_column: String,

    /// Raw label value mapped to +1.
    #[arg(long, default_value = "1")]
    pub positive_label: String,

    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    pub metric: MetricArg,

    /// Which estimates to export.
    #[arg(long, value_enum, default_value_t = StageArg::Midpoint)]
    pub stage: StageArg,

    /// Output CSV path (dataset columns plus a `b` column).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Labeled input CSV.
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long, default_value = "label")]
    pub label_column: String,

    #[arg(long, default_value = "1")]
    pub positive_label: String,

    /// Model family to fit.
    #[arg(long, value_enum)]
    pub model: ModelKindArg,

    /// Kernel width (kernel model only; conflicts with --sigma-rule).
    #[arg(long)]
    pub sigma: Option<f64>,

    /// Derive sigma from the training data (kernel model only).
    #[arg(long, value_enum)]
    pub sigma_rule: Option<SigmaRuleArg>,

    /// Ridge smoothing parameter (kernel model only; defaults to 1e-7).
    #[arg(long)]
    pub gamma: Option<f64>,

    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    pub metric: MetricArg,

    /// Refinement iterations (projection scheme for linear, re-estimation
    /// for kernel).
    #[arg(long, default_value_t = 0)]
    pub iterations: usize,

    /// Estimate stage fed to the regression.
    #[arg(long, value_enum, default_value_t = StageArg::Midpoint)]
    pub stage: StageArg,

    /// Output model JSON path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model JSON produced by `train`.
    #[arg(long)]
    pub model: PathBuf,

    /// Input CSV of points.
    #[arg(long)]
    pub data: PathBuf,

    /// Column to drop before prediction. When omitted, a `label` column is
    /// dropped if present.
    #[arg(long)]
    pub label_column: Option<String>,

    /// Output CSV path (`value,class` per row).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    /// Labeled input CSV.
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long, default_value = "label")]
    pub label_column: String,

    #[arg(long, default_value = "1")]
    pub positive_label: String,

    /// Comma-separated sigma grid.
    #[arg(long, value_delimiter = ',')]
    pub sigma_grid: Vec<f64>,

    /// Comma-separated gamma grid.
    #[arg(long, value_delimiter = ',')]
    pub gamma_grid: Vec<f64>,

    /// Fold count (>= 2) or "loo" for leave-one-out folds.
    #[arg(long, default_value = "5")]
    pub folds: String,

    /// Seed for the stratified fold shuffle.
    #[arg(long)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = StageArg::Midpoint)]
    pub stage: StageArg,

    /// correlation-weighted recomputes weights on every training subset.
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    pub metric: MetricArg,

    /// Output CSV path for the accuracy table.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LoocvArgs {
    /// Labeled input CSV.
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long, default_value = "label")]
    pub label_column: String,

    #[arg(long, default_value = "1")]
    pub positive_label: String,

    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    pub metric: MetricArg,

    /// Per-subset sigma heuristic.
    #[arg(long, value_enum, default_value_t = SigmaRuleArg::Mean)]
    pub sigma_rule: SigmaRuleArg,

    #[arg(long, default_value_t = 1e-7)]
    pub gamma: f64,

    #[arg(long, value_enum, default_value_t = StageArg::Midpoint)]
    pub stage: StageArg,

    /// Optional JSON output with the accuracy and configuration echo.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchLinearArgs {
    #[arg(long, value_enum)]
    pub kind: LinearKindArg,

    /// Comma-separated training sizes.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "10,30,100,300,1000,3000,10000"
    )]
    pub m_list: Vec<usize>,

    #[arg(long, default_value_t = 50)]
    pub trials: usize,

    #[arg(long, default_value_t = 4000)]
    pub test_size: usize,

    #[arg(long, default_value_t = 5)]
    pub iterations: usize,

    #[arg(long)]
    pub seed: u64,

    /// Output base path; writes <base>.json, <base>.csv and <base>_plot.csv.
    #[arg(long)]
    pub out: PathBuf,

    /// External baseline CSV (variant,m,mean_accuracy[,std_accuracy]) merged
    /// into the plot table.
    #[arg(long)]
    pub baseline: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchCheckerboardArgs {
    #[arg(long, default_value_t = 1000)]
    pub train_m: usize,

    /// Test-grid points per axis (200 gives the 40,000-point grid).
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,

    /// Trial count; defaults to 10, or 100 with --full.
    #[arg(long)]
    pub trials: Option<usize>,

    /// Use the full-scale trial count (100).
    #[arg(long)]
    pub full: bool,

    #[arg(long, value_delimiter = ',', default_value = "0.125,0.25,0.5,1,2")]
    pub sigma_grid: Vec<f64>,

    #[arg(long, value_delimiter = ',', default_value = "1e-7,1e-5,1e-3")]
    pub gamma_grid: Vec<f64>,

    #[arg(long, default_value_t = 5)]
    pub folds: usize,

    #[arg(long, value_enum, default_value_t = StageArg::Midpoint)]
    pub stage: StageArg,

    #[arg(long)]
    pub seed: u64,

    /// Output base path; writes <base>.json, <base>.csv and <base>_plot.csv.
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long)]
    pub baseline: Option<PathBuf>,
}
