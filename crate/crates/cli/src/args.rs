use std::path::PathBuf;

use achronal::poincare::Spin;
use clap::{Args, Parser, Subcommand};

use crate::config::Format;
use crate::suites::Suite;

#[derive(Debug, Parser)]
#[command(name = "achronal", version, about = "Verification suites and computations for achronal localization")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Master seed; every random draw derives from it.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Sample count for every randomized check, in place of the defaults.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Worker threads. Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// JSON file overriding suite thresholds.
    #[arg(long, global = true)]
    pub tolerance_file: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite; exits 1 if a hard property fails.
    Verify(VerifyArgs),
    /// Estimate the probability that a state is found in a region.
    Localize(LocalizeArgs),
    /// Tabulate the region of influence of a region on a target surface.
    Influence(InfluenceArgs),
    /// Run the spectrum identities and unitarity checks for one spin.
    Decompose(DecomposeArgs),
    /// Print the spin multiplicity table.
    Multiplicity(MultiplicityArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Lattice universe: a built-in name or a JSON file.
    #[arg(long)]
    pub universe: Option<String>,
    /// State density JSON for the causality, covariance and additivity suites.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Region JSON for causality and covariance.
    #[arg(long)]
    pub region: Option<PathBuf>,
    /// Target surface JSON for causality.
    #[arg(long)]
    pub target: Option<PathBuf>,
    /// Transform JSON for covariance.
    #[arg(long)]
    pub transform: Option<PathBuf>,
    /// JSON array of regions on one surface for additivity.
    #[arg(long)]
    pub partition: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    /// State density JSON.
    pub state: PathBuf,
    /// Region JSON.
    pub region: PathBuf,
}

#[derive(Debug, Args)]
pub struct InfluenceArgs {
    /// Region JSON.
    pub region: PathBuf,
    /// Target surface JSON.
    pub target: PathBuf,
    /// Lower corner of the spatial grid, as `x,y,z`.
    #[arg(long, value_delimiter = ',', default_values_t = [-3.0, -3.0, 0.0], allow_hyphen_values = true)]
    pub min: Vec<f64>,
    /// Upper corner of the spatial grid, as `x,y,z`.
    #[arg(long, value_delimiter = ',', default_values_t = [3.0, 3.0, 0.0], allow_hyphen_values = true)]
    pub max: Vec<f64>,
    /// Grid points along each axis, as `nx,ny,nz`.
    #[arg(long, value_delimiter = ',', default_values_t = [25, 25, 1])]
    pub steps: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Spinor index, such as `0`, `1/2` or `3/2`.
    #[arg(long, default_value = "1/2")]
    pub spin: Spin,
    /// Mass parameter.
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    /// Orbital truncation of the Peter-Weyl tally.
    #[arg(long, default_value_t = 4)]
    pub l_max: u32,
}

#[derive(Debug, Args)]
pub struct MultiplicityArgs {
    /// Largest spin in the table.
    #[arg(long, default_value = "6")]
    pub max_spin: Spin,
}
