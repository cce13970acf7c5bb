//! Command-line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hiz_core::pde::DEFAULT_SEED;

#[derive(Parser, Debug)]
#[command(name = "hiz", version, about = "Exact expansions and checks for HCIZ group integrals at general beta")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Labels {
    /// `tau_ab` with lexicographic edges.
    Tau,
    /// The `v_1..v_6` names for three and four points.
    V,
}

/// `--beta` or `--y`, never both.
#[derive(Args, Debug, Clone, Default)]
pub struct Coupling {
    /// Symmetry parameter beta (rational); converted to y = beta(beta/2 - 1).
    #[arg(long, conflicts_with = "y", allow_negative_numbers = true)]
    pub beta: Option<String>,
    /// The coupling y directly (rational).
    #[arg(long, allow_negative_numbers = true)]
    pub y: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SeedArg {
    /// Random seed.
    #[arg(long, env = "HIZ_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the correction series chi.
    Expand {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        coupling: Coupling,
        /// Truncation order; required when the series does not terminate.
        #[arg(long)]
        order: Option<u32>,
        /// Keep coefficients as polynomials in y (two and three points).
        #[arg(long, conflicts_with_all = ["beta", "y"])]
        symbolic: bool,
        #[arg(long, value_enum, default_value_t = Labels::Tau)]
        labels: Labels,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Solve for chi at even beta by exact collocation.
    Solve {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        beta: u32,
        #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
        backend: BackendArg,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Query a single coefficient or weight.
    Coeff(CoeffArgs),
    /// Three-point coefficients from the recursion.
    K3(K3Args),
    /// The beta = 4 graph expansion and complete-graph weights.
    Graph {
        /// Vertex count of the expansion to print.
        #[arg(long, conflicts_with = "weights")]
        k: Option<usize>,
        /// Print C_0..C_n instead.
        #[arg(long)]
        weights: Option<u32>,
        #[arg(long, value_enum, default_value_t = Labels::V)]
        labels: Labels,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Run a verification suite; exits with 1 if any check fails.
    Verify(VerifyArgs),
    /// Terms of the large-y exponent.
    Largey {
        /// Order in 1/y.
        #[arg(long, required_unless_present = "check", value_parser = clap::value_parser!(u32).range(0..=2))]
        order: Option<u32>,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Run the residual and consistency checks instead.
        #[arg(long)]
        check: bool,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Monte Carlo estimate of the group integral.
    Mc {
        /// o, u or s.
        #[arg(long)]
        ensemble: String,
        #[arg(long)]
        k: usize,
        #[arg(long, env = "HIZ_SAMPLES", default_value_t = 100_000)]
        samples: u64,
        #[command(flatten)]
        seed: SeedArg,
        /// Comma-separated eigenvalues of X.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<String>,
        /// Comma-separated eigenvalues of Lambda.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        lambda: Vec<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendArg {
    Auto,
    Exact,
    Modular,
}

#[derive(Args, Debug)]
#[group(id = "what", required = true, multiple = false, args = ["k3", "complete", "ratio", "weight"])]
pub struct CoeffArgs {
    /// Three-point coefficient C_{n,m,r}.
    #[arg(long, num_args = 3, value_names = ["N", "M", "R"])]
    pub k3: Option<Vec<u32>>,
    /// Complete-graph weight C_n.
    #[arg(long, value_name = "N")]
    pub complete: Option<u32>,
    /// Deletion-rule weight divided by C_k.
    #[arg(long, value_name = "RULE")]
    pub ratio: Option<String>,
    /// Deletion-rule weight.
    #[arg(long, value_name = "RULE")]
    pub weight: Option<String>,
    /// Vertex count for --ratio and --weight.
    #[arg(long)]
    pub k: Option<usize>,
    /// Print the expanded polynomial instead of the factored form.
    #[arg(long)]
    pub expanded: bool,
    #[command(flatten)]
    pub coupling: Coupling,
}

#[derive(Args, Debug)]
pub struct K3Args {
    #[arg(long, requires_all = ["m", "r"], conflicts_with = "table")]
    pub n: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    /// Every coefficient up to this total order.
    #[arg(long, value_name = "ORDER")]
    pub table: Option<u32>,
    /// Keep y symbolic (the default without --y or --beta).
    #[arg(long, conflicts_with_all = ["beta", "y"])]
    pub symbolic: bool,
    #[command(flatten)]
    pub coupling: Coupling,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Pde,
    Largey,
    Mc,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Number of points; each suite picks its own default.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub coupling: Coupling,
    /// Random points for the identity suite.
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    /// Fresh points for the residual suite.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Monte Carlo samples.
    #[arg(long, env = "HIZ_SAMPLES", default_value_t = 200_000)]
    pub samples: u64,
    /// Standard errors allowed in Monte Carlo comparisons.
    #[arg(long, default_value_t = 4.0)]
    pub max_sigma: f64,
    /// Check this JSON series instead of computing one.
    #[arg(long)]
    pub series: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArg,
}
