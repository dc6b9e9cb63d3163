//! Command-line front end: reads distributions, runs the library
//! computations and emits CSV or JSON tables.

pub mod commands;
pub mod output;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use supercomplexity::superstat::{Cutoff, Family};
use supercomplexity::toyuniv::{Bits, DEFAULT_MAX_LEN, DEFAULT_STEP_BUDGET};
use supercomplexity::DEFAULT_K_MAX;

use output::{Base, Format};

/// Environment override for the worker thread count.
pub const THREADS_ENV: &str = "SUPERCOMPLEXITY_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "supercomplexity",
    version,
    about = "Effective entropies, coding checks and a toy prefix machine"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Unit for entropies, lengths and complexities.
    #[arg(long, value_enum, default_value = "bits", global = true)]
    pub base: Base,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    /// Output file (stdout when absent). Relative paths resolve against
    /// $SUPERCOMPLEXITY_OUT_DIR when set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Round numbers for reading instead of full precision.
    #[arg(long, global = true)]
    pub pretty: bool,
    /// Worker threads for fuzzing (0 = all cores).
    #[arg(long, env = THREADS_ENV, default_value_t = 0, global = true)]
    pub threads: usize,
    /// Master seed for randomized checks.
    #[arg(long, default_value_t = 42, global = true)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Natural, plus and minus entropies of a distribution.
    Entropy(EntropyArgs),
    /// Relative entropies of two distributions over the same labels.
    Relent(RelentArgs),
    /// Compare K(n) = n with the effective complexities of 2^-n.
    Figure1(Figure1Args),
    /// Check the coding theorems on a distribution, a fuzz run or a scan.
    Codecheck(CodecheckArgs),
    /// Enumerate programs of the toy prefix machine.
    Enumerate(EnumerateArgs),
    /// Effective Boltzmann factors and entropic forms (natural units).
    Superstat(SuperstatArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Weights are counts to be normalized.
    #[arg(long)]
    pub counts: bool,
    /// Rescale probabilities that do not sum to one.
    #[arg(long)]
    pub renormalize: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    /// File of `label weight` lines.
    #[arg(required_unless_present = "probs")]
    pub input: Option<PathBuf>,
    /// Inline comma-separated probabilities instead of a file.
    #[arg(long, value_delimiter = ',', conflicts_with = "input")]
    pub probs: Option<Vec<f64>>,
    #[command(flatten)]
    pub input_args: InputArgs,
    /// Also report the series forms truncated at this many terms.
    #[arg(long)]
    pub series: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RelentArgs {
    pub p: PathBuf,
    pub q: PathBuf,
    #[command(flatten)]
    pub input_args: InputArgs,
    /// Flip the sign for display (the natural column becomes the KL divergence).
    #[arg(long)]
    pub negate: bool,
    #[arg(long)]
    pub series: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct Figure1Args {
    #[arg(long, default_value_t = 1)]
    pub n_min: u32,
    #[arg(long, default_value_t = 64)]
    pub n_max: u32,
}

#[derive(Debug, Clone, Args)]
pub struct CodecheckArgs {
    /// Distribution to check (one row pair per kind).
    #[arg(conflicts_with_all = ["trials", "scan"])]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub input_args: InputArgs,
    /// File of `label length` lines (in --base units) checked against the
    /// first theorem instead of the ideal lengths.
    #[arg(long, requires = "input")]
    pub lengths: Option<PathBuf>,
    /// Multiplier c' of the second theorem for file input.
    #[arg(long, default_value_t = 2.0)]
    pub cprime: f64,
    /// Number of random trials.
    #[arg(long, conflicts_with = "scan")]
    pub trials: Option<usize>,
    /// Largest number of outcomes in a random trial.
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
    /// Scan two-point distributions y in 0.01..0.99 with c' in {1, 2, 10}.
    #[arg(long)]
    pub scan: bool,
}

#[derive(Debug, Clone, Args)]
pub struct EnumerateArgs {
    #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
    pub max_len: u32,
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    pub step_budget: u64,
    /// Damping per program bit, in nats (default ln 2).
    #[arg(long, default_value_t = std::f64::consts::LN_2)]
    pub beta: f64,
    /// Report only this output string.
    #[arg(long)]
    pub query: Option<Bits>,
    /// With --query, also report the term-by-term series values.
    #[arg(long, requires = "query")]
    pub series_literal: bool,
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SuperstatArgs {
    #[arg(long, default_value = "plus")]
    pub family: Family,
    /// Shape parameter p of the plus and minus factors.
    #[arg(long, default_value_t = 0.5)]
    pub shape: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta0: f64,
    /// Inverse temperature of the standard factor.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Length at which to evaluate the factor and its Laplace representation.
    #[arg(long)]
    pub l: Option<f64>,
    /// Probability at which to evaluate the inverse length and entropic form.
    #[arg(long)]
    pub x: Option<f64>,
    /// Cutoff length of the entropic form (`inf` for none).
    #[arg(long, default_value = "inf")]
    pub ystar: Cutoff,
    /// Use the integration variable as the shape parameter.
    #[arg(long)]
    pub self_identified: bool,
    /// Relative tolerance of the Laplace quadrature.
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Absolute tolerance of the entropic-form quadrature.
    #[arg(long, default_value_t = 1e-10)]
    pub abs_tol: f64,
}

/// Outcome of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: output::Table,
    /// False when a checked inequality failed.
    pub holds: bool,
}

/// Run a parsed command and write its output.
pub fn run(cli: &Cli) -> Result<bool> {
    let report = commands::execute(cli)?;
    let text = report.table.render(cli.global.format, cli.global.pretty)?;
    match &cli.global.out {
        Some(path) => output::write_atomic(&output::resolve_out(path), &text)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(report.holds)
}
