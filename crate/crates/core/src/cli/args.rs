use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::fitting::{DampingMode, JacobianMode, Weighting};
use crate::thermo::EntropyBasis;

#[derive(Debug, Parser)]
#[command(
    name = "smma",
    version,
    about = "Word-length distributions as a grand canonical ensemble"
)]
pub struct Cli {
    /// Output file (or directory for `fit`).
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    /// Format for report files.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub format: OutputFormat,
    /// Suppress summaries and warnings.
    #[arg(short, long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Tsv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tokenize text files into a distinct-word length distribution.
    Ingest(IngestArgs),
    /// Fit the MA and/or SMMA model to a distribution.
    Fit(FitCmdArgs),
    /// Thermodynamic quantities from SMMA parameters.
    Thermo(ThermoArgs),
    /// Compare two or more thermo reports.
    Compare(CompareArgs),
    /// Observed and predicted curves on a dense grid.
    PlotData(PlotArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyChoice {
    /// Out-of-alphabet symbols split a word.
    Split,
    /// Words containing out-of-alphabet symbols are dropped.
    Drop,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Named alphabet (en26, tr29).
    #[arg(long)]
    pub alphabet: Option<String>,
    /// Explicit letter set; overrides the preset letters.
    #[arg(long)]
    pub letters: Option<String>,
    /// Use Turkish dotted/dotless i folding for --letters.
    #[arg(long, requires = "letters")]
    pub turkic_fold: bool,
    /// Alphabet size. Alone, declares an alphabet of any letters with this
    /// size; with --alphabet or --letters it must agree with them.
    #[arg(long)]
    pub omega: Option<u32>,
    #[arg(long, value_enum, default_value_t = PolicyChoice::Split)]
    pub policy: PolicyChoice,
    /// Keep letter case as written.
    #[arg(long)]
    pub no_fold: bool,
    /// Source label stored in the distribution (default: first file stem).
    #[arg(long)]
    pub label: Option<String>,
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Ma,
    Smma,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum JacobianChoice {
    Analytic,
    FiniteDifference,
}

impl From<JacobianChoice> for JacobianMode {
    fn from(c: JacobianChoice) -> Self {
        match c {
            JacobianChoice::Analytic => JacobianMode::Analytic,
            JacobianChoice::FiniteDifference => JacobianMode::FiniteDifference,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DampingChoice {
    Marquardt,
    Identity,
}

impl From<DampingChoice> for DampingMode {
    fn from(c: DampingChoice) -> Self {
        match c {
            DampingChoice::Marquardt => DampingMode::Marquardt,
            DampingChoice::Identity => DampingMode::Identity,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightingChoice {
    Unweighted,
    Poisson,
}

impl From<WeightingChoice> for Weighting {
    fn from(c: WeightingChoice) -> Self {
        match c {
            WeightingChoice::Unweighted => Weighting::Unweighted,
            WeightingChoice::Poisson => Weighting::Poisson,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisChoice {
    Observed,
    Predicted,
}

impl From<BasisChoice> for EntropyBasis {
    fn from(c: BasisChoice) -> Self {
        match c {
            BasisChoice::Observed => EntropyBasis::ObservedCounts,
            BasisChoice::Predicted => EntropyBasis::PredictedCounts,
        }
    }
}

/// Optimizer settings shared by every command that may fit.
#[derive(Debug, Args)]
pub struct FitArgs {
    /// Alphabet size for SMMA (default: from the distribution metadata).
    #[arg(long)]
    pub omega: Option<u32>,
    #[arg(long, default_value_t = 1000)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub initial_damping: f64,
    #[arg(long, default_value_t = 10.0)]
    pub damping_up: f64,
    #[arg(long, default_value_t = 10.0)]
    pub damping_down: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_chisq: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_param: f64,
    #[arg(long, value_enum, default_value_t = JacobianChoice::Analytic)]
    pub jacobian: JacobianChoice,
    #[arg(long, value_enum, default_value_t = DampingChoice::Marquardt)]
    pub damping: DampingChoice,
    #[arg(long, value_enum, default_value_t = WeightingChoice::Unweighted)]
    pub weighting: WeightingChoice,
}

#[derive(Debug, Args)]
pub struct FitCmdArgs {
    /// Distribution file, or `brown` / `metu` for the bundled data.
    pub distribution: PathBuf,
    #[arg(long, value_enum, default_value_t = ModelChoice::Both)]
    pub model: ModelChoice,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Args)]
pub struct ThermoArgs {
    /// Distribution file, or `brown` / `metu` for the bundled data.
    pub distribution: PathBuf,
    /// SMMA fit report to take parameters from (default: fit now).
    #[arg(long, conflicts_with = "params")]
    pub smma_report: Option<PathBuf>,
    /// Explicit SMMA parameters as phi,alpha,theta.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Option<Vec<f64>>,
    /// Partition sum range: observed, auto, or an integer.
    #[arg(long, default_value = "observed")]
    pub lmax: String,
    #[arg(long, value_enum, default_value_t = BasisChoice::Observed)]
    pub entropy_basis: BasisChoice,
    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Thermo report JSON files; labels come from the file stems.
    #[arg(num_args = 0..)]
    pub reports: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Distribution file, or `brown` / `metu` for the bundled data.
    pub distribution: PathBuf,
    #[arg(long)]
    pub ma_report: Option<PathBuf>,
    #[arg(long)]
    pub smma_report: Option<PathBuf>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Add a generation timestamp line (makes output non-reproducible).
    #[arg(long)]
    pub timestamp: bool,
    /// Also print the observed/MA/SMMA count table to stderr.
    #[arg(long)]
    pub table: bool,
    #[command(flatten)]
    pub fit: FitArgs,
}
