//! Command-line surface: one binary, six subcommands.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::OutputFormat;

/// Exact analysis of k-bonacci random walks: sequences, walks, return
/// probabilities, and fractal dimensions, with reproducible output.
///
/// Exit codes: 0 when every internal agreement check passes, 2 when a
/// check fails, 1 on input or I/O errors (reported as JSON on stderr).
#[derive(Debug, Parser)]
#[command(name = "kbonacci", version, arg_required_else_help = true)]
pub struct Cli {
    /// Optional JSON config file; flags take precedence over its values.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output rendering (default: table; config key `output_format`).
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a term table f_0..f_n for a validated start.
    Sequence(SequenceArgs),
    /// Evaluate a sign word: partial sums, or a visit-time check against
    /// the combinatorial prediction when --target is given.
    Walk(WalkArgs),
    /// Exact visit-count laws next to the brute-force enumeration oracle.
    Probs(ProbsArgs),
    /// Box-counting dimension profiles and Moran-equation roots.
    Dimension(DimensionArgs),
    /// Seeded Monte Carlo with standard errors and z-scores against the
    /// exact laws.
    Montecarlo(MonteCarloArgs),
    /// Run the full one-shot oracle-equivalence suite.
    Verify,
}

/// How the walk's step sequence starts.
#[derive(Debug, Args)]
pub struct SpecFlags {
    /// Recurrence order (default 2, or the length of --init).
    #[arg(long)]
    pub k: Option<usize>,

    /// Use the powers start f_n = 2^(n-1) for n = 1..k (the default).
    #[arg(long, conflicts_with_all = ["tribonacci", "init"])]
    pub powers: bool,

    /// Use the order-3 start [1, 3, 6].
    #[arg(long, conflicts_with = "init")]
    pub tribonacci: bool,

    /// Custom initial terms, comma-separated (e.g. --init 1,3,6).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub init: Option<Vec<i64>>,
}

#[derive(Debug, Args)]
pub struct SequenceArgs {
    #[command(flatten)]
    pub spec: SpecFlags,

    /// Largest index to tabulate (default 10).
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    #[command(flatten)]
    pub spec: SpecFlags,

    /// The sign word, e.g. "++-+".
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,

    /// Check visit times against the prediction: zero, f1, or neg-f1.
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Debug, Args)]
pub struct ProbsArgs {
    #[command(flatten)]
    pub spec: SpecFlags,

    /// zero (default), f1, neg-f1, or a decimal integer.
    #[arg(long)]
    pub target: Option<String>,

    /// Largest exact visit count to report (default 3 for zero, 2 for f1).
    #[arg(long)]
    pub imax: Option<usize>,

    /// Enumerated prefix length (default: shortest that decides i_max;
    /// capped, override the cap with KBONACCI_ENUM_CAP).
    #[arg(long)]
    pub prefix_len: Option<usize>,

    /// Compare the oracle against the competing closed form 1/2^((k+1)i)
    /// instead of the confirmed law (expected to disagree for i >= 1).
    #[arg(long)]
    pub alternative_law: bool,
}

#[derive(Debug, Args)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub spec: SpecFlags,

    /// Deepest cylinder depth in the covering profile (default 120).
    #[arg(long)]
    pub mmax: Option<usize>,

    /// Profile the f1-visit set of the [1,3,6] walk instead of the
    /// always-returning set.
    #[arg(long, conflicts_with = "ratios")]
    pub tribonacci_f1: bool,

    /// Solve the Moran equation for these contraction ratios only,
    /// comma-separated (e.g. --ratios 0.5,0.25).
    #[arg(long, value_delimiter = ',')]
    pub ratios: Option<Vec<f64>>,

    /// Bisection tolerance for the Moran root (default 1e-13).
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub spec: SpecFlags,

    /// zero (default), f1, neg-f1, or a decimal integer.
    #[arg(long)]
    pub target: Option<String>,

    /// Steps per trial (default 6(k+1)).
    #[arg(long)]
    pub horizon: Option<usize>,

    /// Number of trials (default 100000).
    #[arg(long)]
    pub trials: Option<u64>,

    /// RNG seed; required, so runs are reproducible by construction.
    #[arg(long)]
    pub seed: Option<u64>,
}
