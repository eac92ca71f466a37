use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "npa", version, about = "Nonlinear preferential attachment graphs: solve, simulate, ingest, calibrate")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "NPA_OUT_DIR", default_value = "npa-out")]
    pub out: PathBuf,
    /// Table formats to write.
    #[arg(long, global = true, value_delimiter = ',', default_value = "csv")]
    pub formats: Vec<Format>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// More logging; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Analytic vertex and edge degree distributions of a model spec.
    Solve(SolveArgs),
    /// Grow graphs from a model spec or preset.
    Generate(GenerateArgs),
    /// Read an edge list and write its degree distributions.
    Ingest(IngestArgs),
    /// Fit a model to a target written by `ingest`.
    Calibrate(CalibrateArgs),
    /// Window distance between two edge matrices.
    Compare(CompareArgs),
    /// Write a bundled model spec.
    Preset(PresetArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recurrence {
    MeanWeight,
    AsPrinted,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    /// Model spec (JSON).
    pub spec: PathBuf,
    /// Largest degree of the vertex distribution.
    #[arg(long, default_value_t = 10_000)]
    pub kmax: usize,
    /// Largest degree of the edge matrix.
    #[arg(long, default_value_t = 300)]
    pub umax: usize,
    #[arg(long, value_enum, default_value = "mean-weight")]
    pub recurrence: Recurrence,
    /// Fail when more arc mass than this lies outside the edge matrix.
    #[arg(long)]
    pub max_edd_deficit: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Brightkite,
    Gowalla,
    BaTree,
    Linear,
    Sublinear,
    Superlinear,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    /// Model spec (JSON); alternatively use --preset.
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Vertex count (NPA), row count (AER) or total count (composite).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: u64,
    /// Largest degree of the measured edge matrix.
    #[arg(long, default_value_t = 50)]
    pub u: usize,
    /// Random bridge edges between composite vertices.
    #[arg(long, default_value_t = 0)]
    pub bridges: usize,
    /// Write parallel edges once.
    #[arg(long)]
    pub collapse: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct IngestArgs {
    /// Edge list, plain or gzip.
    pub dataset: PathBuf,
    /// none, log-bin:RATIO or tail-powerlaw:CUT.
    #[arg(long, default_value = "none")]
    pub smooth: String,
    /// Edge mass the comparison window must hold.
    #[arg(long, default_value_t = 0.95)]
    pub u_mass: f64,
    /// Fixed comparison window instead of --u-mass.
    #[arg(long)]
    pub u: Option<usize>,
    /// Largest degree of the written edge matrix (default: max degree, at most 2000).
    #[arg(long)]
    pub extent: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Single,
    Composite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum First {
    BaTree,
    Aer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightModeArg {
    Linear,
    TableFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AerVariantArg {
    Raw,
    IsolatesRemoved,
    Pruned,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CalibrateArgs {
    /// Directory written by `ingest` (summary.json, vdd.csv, edd.csv).
    pub target: PathBuf,
    #[arg(long, value_enum, default_value = "single")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "ba-tree")]
    pub first: First,
    /// Comparison window; defaults to the one in summary.json.
    #[arg(long)]
    pub u: Option<usize>,
    /// Increments are fitted on [g, support].
    #[arg(long, default_value_t = 50)]
    pub support: usize,
    #[arg(long, value_enum, default_value = "table-free")]
    pub weight_mode: WeightModeArg,
    #[arg(long, default_value_t = 1.0)]
    pub vdd_weight: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Objective evaluations per optimizer restart.
    #[arg(long, default_value_t = 4_000)]
    pub max_evals: usize,
    #[arg(long, default_value_t = 400)]
    pub patience: usize,
    #[arg(long, default_value_t = 10_000)]
    pub kmax: usize,
    #[arg(long, default_value_t = 2)]
    pub outer: usize,
    #[arg(long, default_value_t = 0.025)]
    pub rho_step: f64,
    #[arg(long)]
    pub initial_rho: Option<f64>,
    /// Keep the fraction at --initial-rho and fit only the complement.
    #[arg(long, requires = "initial_rho")]
    pub fixed_rho: bool,
    #[arg(long, default_value_t = 300)]
    pub rho_search_evals: usize,
    #[arg(long, default_value_t = 2.75)]
    pub aer_mean_degree: f64,
    #[arg(long, default_value_t = 35_000)]
    pub aer_n1: usize,
    #[arg(long, default_value_t = 10)]
    pub aer_reps: usize,
    #[arg(long, value_enum, default_value = "isolates-removed")]
    pub aer_variant: AerVariantArg,
    /// Seed of the AER estimate.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    /// Edge matrix CSV (l,k,probability).
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub g: usize,
    #[arg(long)]
    pub u: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PresetArgs {
    #[arg(value_enum)]
    pub name: Preset,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
