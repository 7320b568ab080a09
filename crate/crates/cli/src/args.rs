//! Command-line grammar. Every option shows its default in `--help`.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use powerspec::lattice::DEFAULT_BUDGET;

#[derive(Debug, Parser)]
#[command(
    name = "powerspec",
    version,
    about = "Spectra of power-law random features",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master random seed
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output file (spectrum CSV) or directory (layers) [default: stdout for spectrum, `layers_out` for layers]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Write a JSON run summary to this path [default: none]
    #[arg(long = "json-summary", global = true)]
    pub json_summary: Option<PathBuf>,

    /// Use fixed-order reductions so repeated runs are bitwise identical
    #[arg(long, global = true)]
    pub deterministic: bool,

    /// Maximum worker threads [default: one per core]
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Flat `key = value` file with `#` comments; flags on the command line win [default: none]
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice-point counts and their leading asymptotics
    Lattice {
        #[command(subcommand)]
        op: LatticeOp,
    },
    /// Eigenvalue spectra: Monte Carlo, exact population, H^pi tuples, theory curve
    Spectrum {
        #[command(subcommand)]
        op: SpectrumOp,
    },
    /// Propagate data through a random-init MLP and fit each layer's spectrum
    Layers(LayersArgs),
    /// Run the acceptance suite and print PASS/FAIL per criterion
    Selftest(SelftestArgs),
}

#[derive(Debug, Subcommand)]
pub enum LatticeOp {
    /// Exact count, with the asymptotic value and ratio when available
    Count(LatticeArgs),
    /// Leading-order asymptotic value
    Asym(LatticeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    /// Threshold X on the product s_1^pi_1 ... s_k^pi_k
    #[arg(long = "X")]
    pub x: f64,

    /// Comma-separated exponents
    #[arg(long, value_delimiter = ',', default_value = "1,1")]
    pub pi: Vec<f64>,

    /// Count strictly increasing tuples s_1 < ... < s_k
    #[arg(long)]
    pub ordered: bool,

    /// Upper bound on every coordinate (ordered counts only) [default: none]
    #[arg(long = "bound-v")]
    pub bound_v: Option<u64>,

    /// Maximum inner-loop iterations before refusing
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Subcommand)]
pub enum SpectrumOp {
    /// Monte Carlo feature covariance for a Gaussian sketch
    Mc(McArgs),
    /// Exact population covariance for a monomial activation
    Exact(ExactArgs),
    /// Largest eigenvalues of H^pi over strictly increasing tuples
    Hpi(HpiArgs),
    /// Eigenvalues predicted by the counting curve
    Theory(TheoryArgs),
}

/// Inclusive 1-based index range written `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for IndexRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("`{s}` is not a range of the form a..b"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` in range `{s}` is not a positive integer"))
        };
        let (start, end) = (parse(a)?, parse(b)?);
        if start == 0 || start > end {
            return Err(format!("range `{s}` must satisfy 1 <= a <= b"));
        }
        Ok(Self { start, end })
    }
}

impl std::fmt::Display for IndexRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Index window for the log-log slope fit (clipped to the spectrum length)
    #[arg(long, default_value = "1..100")]
    pub fit: IndexRange,

    /// Also write `<out>_normalized.csv` with eigenvalues divided by the largest (needs --out)
    #[arg(long)]
    pub normalized: bool,

    /// Also write a raw little-endian f64 sidecar `<out>.bin` (needs --out)
    #[arg(long)]
    pub sidecar: bool,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Monomial degree; shorthand for --act x^P [default: 1 when --act is absent]
    #[arg(long, conflicts_with = "act")]
    pub p: Option<u32>,

    /// Activation: x^p, relu, tanh, heaviside, gauss_bump, hermite:k, identity, constant
    #[arg(long)]
    pub act: Option<String>,

    /// Ambient dimension
    #[arg(long, default_value_t = 1000)]
    pub v: usize,

    /// Sketch dimension
    #[arg(long, default_value_t = 1000)]
    pub d: usize,

    /// Number of samples
    #[arg(long, default_value_t = 20_000)]
    pub m: usize,

    /// Population exponent
    #[arg(long, default_value_t = 1.31)]
    pub alpha: f64,

    /// Data distribution: gaussian, rademacher, student-t:NU
    #[arg(long, default_value = "gaussian")]
    pub dist: String,

    /// Subtract the empirical feature mean
    #[arg(long)]
    pub centered: bool,

    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ExactArgs {
    /// Monomial degree (at most 6)
    #[arg(long, default_value_t = 1)]
    pub p: u32,

    /// Ambient dimension
    #[arg(long, default_value_t = 1000)]
    pub v: usize,

    /// Sketch dimension (at most 2000)
    #[arg(long, default_value_t = 1000)]
    pub d: usize,

    /// Population exponent
    #[arg(long, default_value_t = 1.31)]
    pub alpha: f64,

    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, Args)]
pub struct HpiArgs {
    /// Population exponent
    #[arg(long, default_value_t = 1.31)]
    pub alpha: f64,

    /// Ambient dimension
    #[arg(long, default_value_t = 10_000)]
    pub v: usize,

    /// Comma-separated composition
    #[arg(long, value_delimiter = ',', default_value = "1,1")]
    pub pi: Vec<u32>,

    /// Number of eigenvalues
    #[arg(long, default_value_t = 1000)]
    pub k: usize,

    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TheoryArgs {
    /// Monomial degree (1, 2 or 3)
    #[arg(long, default_value_t = 3)]
    pub p: u32,

    /// Population exponent
    #[arg(long, default_value_t = 1.31)]
    pub alpha: f64,

    /// Index range of the prediction
    #[arg(long, default_value = "1..1000")]
    pub j: IndexRange,

    /// Scale C in eps_j = C u_j^-alpha [default: the curve's principal coefficient]
    #[arg(long)]
    pub c: Option<f64>,

    #[command(flatten)]
    pub fit: FitArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LayersArgs {
    /// CIFAR-10 batch directory, or `synthetic` for Gaussian power-law input
    #[arg(long, default_value = "synthetic")]
    pub data: String,

    /// Comma-separated layer widths
    #[arg(long, value_delimiter = ',', default_value = "1024,1024,1024,1024")]
    pub widths: Vec<usize>,

    /// Activation of every layer
    #[arg(long, default_value = "tanh")]
    pub act: String,

    /// Normalization after each activation: none, rmsnorm, layernorm
    #[arg(long, default_value = "none")]
    pub norm: String,

    /// Number of input samples
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,

    /// Input dimension for synthetic data
    #[arg(long, default_value_t = 3072)]
    pub v: usize,

    /// Input exponent for synthetic data
    #[arg(long, default_value_t = 1.31)]
    pub alpha: f64,

    /// Index window for the per-layer slope fits
    #[arg(long, default_value = "1..100")]
    pub fit: IndexRange,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    /// Reduced scale
    #[arg(long)]
    pub quick: bool,

    /// CIFAR-10 batch directory for the data-dependent criterion [default: $POWERSPEC_CIFAR_DIR, then data/cifar-10-batches-bin]
    #[arg(long = "cifar-dir")]
    pub cifar_dir: Option<PathBuf>,
}
