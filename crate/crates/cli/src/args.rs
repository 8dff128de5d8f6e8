use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coldvrp::Strategy;

#[derive(Debug, Parser)]
#[command(name = "coldvrp", version, about = "Collaborative cold-chain multi-depot routing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance under one strategy.
    Solve(SolveArgs),
    /// Run every strategy over several seeds and summarise.
    Compare(CompareArgs),
    /// Vary one cost coefficient and record the cost items per run.
    Sweep(SweepArgs),
    /// Exact optimum of a tiny instance by enumeration.
    Oracle(OracleArgs),
    /// Write a random instance as JSON.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Defaults file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set alpha=0.8`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// `fixed:HH:MM` or `flexible:HH:MM-HH:MM`.
    #[arg(long, default_value = "fixed:09:00")]
    pub departure: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Cordeau,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Defaults to `json` for `.json` files and `cordeau` otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Seed for splitting orders when the stand-alone scenario needs them.
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: InstanceArgs,
    #[arg(long)]
    pub strategy: Strategy,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for solution.json and costs.csv.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write trace.csv with one row per temperature step.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: InstanceArgs,
    /// Comma-separated strategies.
    #[arg(long, value_delimiter = ',', default_value = "standalone,cc,boc,rboc")]
    pub strategies: Vec<Strategy>,
    #[arg(long, default_value_t = 5)]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Summary CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Lambda,
    C1,
    Alpha,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: InstanceArgs,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    pub values: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "cc,boc,rboc")]
    pub strategies: Vec<Strategy>,
    #[arg(long, default_value_t = 1)]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: InstanceArgs,
    #[arg(long)]
    pub strategy: Strategy,
    /// Optional directory for solution.json and costs.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    CaseStudy,
    Benchmark,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, value_enum, default_value = "benchmark")]
    pub kind: Kind,
    /// Ignored for the case study.
    #[arg(long, default_value_t = 48)]
    pub customers: usize,
    /// Ignored for the case study.
    #[arg(long, default_value_t = 4)]
    pub depots: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the stand-alone order split instead, using this seed.
    #[arg(long)]
    pub split: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}
