use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use drg_core::Tolerance;

#[derive(Parser, Debug, Clone)]
#[command(name = "drg", version, about = "Invariants of distance-regular graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Analyse an intersection array `b0,...,b_{D-1};c1,...,cD`.
    Array(ArrayArgs),
    /// Analyse a concrete graph from a built-in family or an edge list.
    Graph(GraphArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Zero threshold for every floating-point check.
    #[arg(long, env = "DRG_TOLERANCE", default_value_t = Tolerance::DEFAULT_EPS)]
    pub tolerance: f64,
    /// Seed for the randomized module splitting.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report as JSON to this path.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Search for classical parameters.
    #[arg(long)]
    pub classical: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ArrayArgs {
    /// The array, for example `3,2,1;1,2,3`.
    pub array: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    Hypercube,
    Hamming,
    Johnson,
    Cycle,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// Edge-list file: a header `n m` followed by `m` lines `u v`.
    #[arg(conflicts_with = "family", required_unless_present = "family")]
    pub edges: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<FamilyName>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub base_vertex: usize,
    /// Decompose the standard module into irreducible modules.
    #[arg(long)]
    pub modules: bool,
    /// Run the matrix identity suite.
    #[arg(long)]
    pub verify_identities: bool,
    /// Check the balanced-set condition for the Q-polynomial generator.
    #[arg(long)]
    pub balanced_set: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}
