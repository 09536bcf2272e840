//! `qasym` command-line front end.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qasym::Error),

    #[error("{0}")]
    Usage(String),

    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },

    /// The run completed but a check it reports on failed.
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::CheckFailed(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qasym", version, about = "High-precision q-series, q-polynomial and partition function numerics")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Base q as a decimal literal in (0, 1).
    #[arg(long, global = true, default_value = "0.5", allow_hyphen_values = true)]
    pub q: String,

    #[arg(long = "precision-bits", global = true, env = "QASYM_PRECISION_BITS", default_value_t = qasym::numerics::DEFAULT_MANTISSA_BITS)]
    pub precision_bits: u32,

    #[arg(long = "tail-tol", global = true, default_value_t = qasym::numerics::DEFAULT_TAIL_TOL)]
    pub tail_tol: f64,

    /// Output format; single values default to paper-text, tables to csv.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads for `partition converge` (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// X_{j,m}(z) = Σ_k q^{k²} z^k (−k−m)_j (−1)^j.
    Theta(ThetaArgs),
    /// Stieltjes-Wigert, q-Laguerre and q-Hermite polynomials.
    #[command(subcommand)]
    Poly(PolyCommand),
    /// L×N partition function: exact values and large-N predictions.
    #[command(subcommand)]
    Partition(PartitionCommand),
    /// Large-degree asymptotics.
    #[command(subcommand)]
    Asym(AsymCommand),
    /// Randomized identity suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct ThetaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 0)]
    pub j: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub m: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Sw,
    Qlaguerre,
    Qhermite,
}

#[derive(Debug, Subcommand)]
enum PolyCommand {
    /// x^j P^{(j)}(x) for a family member.
    Eval(PolyEvalArgs),
    /// Positive zeros and their symmetry products.
    Zeros(PolyZerosArgs),
}

#[derive(Debug, Args)]
pub struct PolyEvalArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub alpha: String,
    /// Evaluation point; for qhermite this is x = sinh ξ.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 0)]
    pub j: usize,
}

#[derive(Debug, Args)]
pub struct PolyZerosArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub alpha: String,
    /// Print the rounded symmetry products as one comma-separated line.
    #[arg(long = "paper-table")]
    pub paper_table: bool,
}

#[derive(Debug, Subcommand)]
enum PartitionCommand {
    /// Exact Ẑ_{L×N}.
    Exact(PartitionExactArgs),
    /// Large-N prediction for the scaled partition function.
    Predict(PartitionSizeArgs),
    /// Exact versus predicted over a range of N.
    Converge(PartitionConvergeArgs),
}

#[derive(Debug, Args)]
pub struct PartitionSizeArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long = "L")]
    pub l: usize,
}

#[derive(Debug, Args)]
pub struct PartitionExactArgs {
    #[command(flatten)]
    pub size: PartitionSizeArgs,
    #[arg(long, default_value = "wronskian")]
    pub method: String,
}

#[derive(Debug, Args)]
pub struct PartitionConvergeArgs {
    #[arg(long = "L")]
    pub l: usize,
    #[arg(long = "N-from")]
    pub n_from: usize,
    #[arg(long = "N-to")]
    pub n_to: usize,
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    /// Plot data path (default: the --output path with a .dat extension).
    #[arg(long)]
    pub dat: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum AsymCommand {
    /// Exact value against the leading-order estimate and its bound.
    Check(AsymCheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Osc,
    Right,
    Left,
}

#[derive(Debug, Args)]
pub struct AsymCheckArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub j: u32,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    #[arg(long, allow_hyphen_values = true)]
    pub y: String,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "l")]
    pub t: Option<f64>,
    #[arg(long)]
    pub l: Option<f64>,
    /// Window half-width as a fraction of n (default: bound-minimizing).
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = qasym::selftest::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
}

fn configure_threads(command: &Command, jobs: Option<usize>) {
    let threads = match command {
        Command::Partition(PartitionCommand::Converge(_)) => jobs.unwrap_or(0),
        _ => 1,
    };
    // only fails if a pool already exists
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}

fn run(cli: Cli) -> Result<(), CliError> {
    if cli.global.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    configure_threads(&cli.command, cli.global.jobs);
    let g = &cli.global;
    match &cli.command {
        Command::Theta(a) => commands::theta(g, a),
        Command::Poly(PolyCommand::Eval(a)) => commands::poly_eval(g, a),
        Command::Poly(PolyCommand::Zeros(a)) => commands::poly_zeros(g, a),
        Command::Partition(PartitionCommand::Exact(a)) => commands::partition_exact(g, a),
        Command::Partition(PartitionCommand::Predict(a)) => commands::partition_predict(g, a),
        Command::Partition(PartitionCommand::Converge(a)) => commands::partition_converge(g, a),
        Command::Asym(AsymCommand::Check(a)) => commands::asym_check(g, a),
        Command::Selftest(a) => commands::selftest(g, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            // one diagnostic line: the message up to the usage block
            let rendered = e.to_string();
            let line: Vec<&str> = rendered
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:"))
                .filter(|l| !l.is_empty())
                .collect();
            eprintln!("{}", line.join(" "));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
