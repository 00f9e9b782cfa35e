use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "lattice-ortho",
    version,
    about = "Orthogonal polynomials on quadratic lattices: weights, recurrences and orthogonality checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discrete weights r_k at the nodes x_k.
    Weights(WeightsArgs),
    /// Gram matrix of the monic polynomials against the weights.
    Verify(VerifyArgs),
    /// Recurrence coefficients beta_n, alpha_n and norms K_n.
    Recurrence(RecurrenceArgs),
    /// Generalized moments m_k, optionally with their recovery from the weights.
    Moments(MomentsArgs),
    /// Check the family hypotheses (distinct nodes and eigenvalues, termination).
    Validate(ValidateArgs),
    /// List the named families and their arguments.
    Families(OutputArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write to this file (atomically) instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// Named family (see the `families` subcommand).
    #[arg(long, conflicts_with = "raw", required_unless_present = "raw")]
    pub family: Option<String>,
    /// Family argument as name=value; repeatable.
    #[arg(long = "arg", value_name = "NAME=VALUE")]
    pub args: Vec<String>,
    /// The seven lattice parameters, e.g. a1=1,a2=0,b0=0,b1=1,b2=0,d1=0,d2=-1.
    #[arg(long, value_name = "LIST")]
    pub raw: Option<String>,
    /// Working precision in bits.
    #[arg(long, env = "LATTICE_ORTHO_PRECISION", default_value_t = 256)]
    pub precision: u32,
    /// Target accuracy of summed series and pass threshold of checks.
    #[arg(long, default_value_t = 1e-30)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WeightsArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Number of weights (capped at the size of a finite family; default 10
    /// for infinite ones).
    #[arg(long)]
    pub count: Option<usize>,
    /// closed-form, direct-series or triangular.
    #[arg(long, default_value = "closed-form")]
    pub method: String,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Highest polynomial degree.
    #[arg(long, default_value_t = 5)]
    pub nmax: usize,
    /// Number of nodes summed over (default: the whole finite family, or 100).
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long, default_value = "closed-form")]
    pub method: String,
}

#[derive(Debug, Clone, Args)]
pub struct RecurrenceArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Highest index n.
    #[arg(long = "n", visible_alias = "nmax", default_value_t = 10)]
    pub n: usize,
}

#[derive(Debug, Clone, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Number of moments.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Also report |sum_j v_k(x_j) r_j - m_k| with the weights truncated at K.
    #[arg(long = "K")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Indices checked for collisions and termination.
    #[arg(long, default_value_t = 50)]
    pub nmax: usize,
}
