use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "knn-minimax", version, about = "Nearest-neighbor classification experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monte Carlo excess risk of k-NN schedules, or the standard/sliced table.
    Simulate(SimulateArgs),
    /// Excess-risk decay along an n grid for power-law tails.
    Rates(RatesArgs),
    /// Empirical check of the tail, margin or minimal-mass assumption.
    Check(CheckArgs),
    /// Solve the balance equation for a tail function.
    Solve(SolveArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityArg {
    Analytic,
    Kde,
}

/// Flags shared by the experiment subcommands.
#[derive(Args, Debug, Default)]
pub struct Common {
    /// Base seed; identical seeds give byte-identical output.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent). Written atomically.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON file with defaults for any long flag (snake_case keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (fallback: KNN_MINIMAX_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Run the five-row standard versus sliced comparison.
    #[arg(long)]
    pub table2: bool,
    /// Model: JSON descriptor or family name (gauss, laplace, cauchy, powerlaw, ...).
    #[arg(long)]
    pub model: Option<String>,
    /// Training sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Schedules, comma separated: fixed<k>, compact, general, standard, sliced, sliced_theoretical.
    #[arg(long, value_delimiter = ',')]
    pub schedule: Option<Vec<String>>,
    /// Replications per configuration.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Test points per replication.
    #[arg(long)]
    pub n_test: Option<usize>,
    /// Margin exponent used by the rate schedules.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Density that the sliced schedules slice on.
    #[arg(long, value_enum)]
    pub density: Option<DensityArg>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RatesArgs {
    /// Tail exponents, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub g: Option<Vec<f64>>,
    /// Training sizes, comma separated and increasing (at least four).
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    /// Class-1 center of the location model.
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Assumption {
    Tail,
    Margin,
    Mass,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub assumption: Option<Assumption>,
    /// Model: JSON descriptor or family name.
    #[arg(long)]
    pub model: Option<String>,
    /// Tail thresholds ε, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Margin thresholds t, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub t: Option<Vec<f64>>,
    /// Ball radii δ for the minimal-mass check, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub delta: Option<Vec<f64>>,
    /// Monte Carlo sample size.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Tail bound ψ to test against: id, power:g or powerlog:g,r.
    #[arg(long)]
    pub psi: Option<String>,
    /// Constant C in the tested bound (C·ψ(ε) or C·t^α).
    #[arg(long)]
    pub c: Option<f64>,
    /// Margin exponent for the margin bound.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Required minimal-mass ratio κ.
    #[arg(long)]
    pub kappa: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Tail function: id, power:g or powerlog:g,r.
    #[arg(long)]
    pub psi: Option<String>,
    /// Constant C in ψ = C·form.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    /// Print JSON instead of key=value lines.
    #[arg(long)]
    pub json: bool,
    /// JSON file with defaults for any long flag.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Lower,
    Upper,
}

/// Config-file contents for `simulate`; keys mirror the long flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub table2: Option<bool>,
    pub model: Option<serde_json::Value>,
    pub n: Option<NList>,
    pub schedule: Option<StrList>,
    pub reps: Option<usize>,
    pub n_test: Option<usize>,
    pub alpha: Option<f64>,
    pub density: Option<DensityArg>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesFile {
    pub g: Option<Vec<f64>>,
    pub n: Option<NList>,
    pub reps: Option<usize>,
    pub n_test: Option<usize>,
    pub b: Option<f64>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckFile {
    pub assumption: Option<Assumption>,
    pub model: Option<serde_json::Value>,
    pub eps: Option<Vec<f64>>,
    pub t: Option<Vec<f64>>,
    pub delta: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub psi: Option<String>,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub kappa: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveFile {
    pub psi: Option<String>,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub d: Option<usize>,
    pub n: Option<f64>,
    pub side: Option<SideArg>,
    pub json: Option<bool>,
}

/// A single value or a list in a config file.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum NList {
    One(usize),
    Many(Vec<usize>),
}

impl NList {
    pub fn into_vec(self) -> Vec<usize> {
        match self {
            NList::One(v) => vec![v],
            NList::Many(v) => v,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum StrList {
    One(String),
    Many(Vec<String>),
}

impl StrList {
    pub fn into_vec(self) -> Vec<String> {
        match self {
            StrList::One(v) => v.split(',').map(str::to_string).collect(),
            StrList::Many(v) => v,
        }
    }
}
