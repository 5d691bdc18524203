use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sausage", version, about = "Expected volume of the Wiener sausage of a drifted Brownian motion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected volume at one time
    Volume(VolumeArgs),
    /// Expected volume on a uniform time grid
    Table(TableArgs),
    /// Long-time growth constant
    Asymptote(AsymptoteArgs),
    /// Monte Carlo estimate compared with the formula
    Simulate(SimulateArgs),
    /// Expected volume without drift
    Driftless(DriftlessArgs),
    /// Cross-check battery; exits 1 if any check fails
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Series,
    Inversion,
}

#[derive(Debug, Args)]
pub struct Model {
    /// Dimension d >= 2
    #[arg(long)]
    pub dim: u32,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Drift magnitude |v| > 0
    #[arg(long)]
    pub drift: f64,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VolumeArgs {
    #[command(flatten)]
    pub model: Model,
    #[arg(long)]
    pub time: f64,
    /// Relative tolerance for truncation and quadrature
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = RouteArg::Series)]
    pub route: RouteArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub model: Model,
    #[arg(long)]
    pub tmin: f64,
    #[arg(long)]
    pub tmax: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = RouteArg::Series)]
    pub route: RouteArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AsymptoteArgs {
    #[command(flatten)]
    pub model: Model,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Also report the zero-drift limit and the gap to it
    #[arg(long)]
    pub limit: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Dimension, 2 or 3
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Drift vector as comma-separated components; a single value is taken
    /// along the first axis
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub drift: Vec<f64>,
    #[arg(long)]
    pub time: f64,
    /// Time step; defaults to time * 1e-4
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    pub paths: usize,
    /// Hit-or-miss points per path
    #[arg(long, default_value_t = 4000)]
    pub points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to SAUSAGE_THREADS or the number of CPUs
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct DriftlessArgs {
    /// Dimension m >= 1
    #[arg(long)]
    pub dim: u32,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long)]
    pub time: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Small grid only
    #[arg(long)]
    pub quick: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
