//! dppsum: extractive multi-document summarization with determinantal
//! point processes, plus the supporting kernel/sampling/inference tools.

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config values (exit 2, shared with clap's own usage errors).
    Usage(String),
    /// Filesystem problems (exit 3).
    Io(std::io::Error),
    /// Malformed input files: kernels, costs, clusters, models (exit 4).
    Format(String),
    /// Numeric or domain failures inside the computation (exit 5).
    Domain(String),
    /// Inference produced no usable result, e.g. an empty sample window (exit 6).
    Inference(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Format(_) => 4,
            CliError::Domain(_) => 5,
            CliError::Inference(_) => 6,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::Format(m) => write!(f, "format: {m}"),
            CliError::Domain(m) => write!(f, "domain: {m}"),
            CliError::Inference(m) => write!(f, "inference: {m}"),
        }
    }
}

impl From<dpp::DppError> for CliError {
    fn from(e: dpp::DppError) -> Self {
        match e {
            dpp::DppError::Io(io) => CliError::Io(io),
            dpp::DppError::MatrixFormat(m) => CliError::Format(m),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<sumpipe::PipeError> for CliError {
    fn from(e: sumpipe::PipeError) -> Self {
        match e {
            sumpipe::PipeError::Io(io) => CliError::Io(io),
            sumpipe::PipeError::Dpp(d) => d.into(),
            m @ (sumpipe::PipeError::MalformedCluster { .. }
            | sumpipe::PipeError::EmptyCluster { .. }) => CliError::Format(m.to_string()),
            sumpipe::PipeError::Json(j) => CliError::Format(j.to_string()),
            other => CliError::Domain(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser)]
#[command(
    name = "dppsum",
    version,
    about = "Diverse extractive summarization with determinantal point processes"
)]
struct Cli {
    /// Key-value defaults file (`key = value`); flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit feature bins, build oracle extracts, and train the model
    Train(TrainArgs),
    /// Summarize a cluster with a trained model
    Summarize(SummarizeArgs),
    /// Quality/similarity tradeoff baseline selection
    BaselineMmr(BaselineMmrArgs),
    /// First bytes of the cluster text
    BaselineBegin(BaselineBeginArgs),
    /// Score summary files against cluster references
    Eval(EvalArgs),
    /// Draw subsets from a kernel file
    Sample(SampleArgs),
    /// Budgeted greedy MAP selection on a kernel file
    Map(MapArgs),
    /// MMR selection on a kernel file
    Mmr(MmrArgs),
    /// Factor tables and manifold slices
    #[command(subcommand)]
    Diag(DiagCommand),
    /// Fit feature bins or emit per-sentence feature vectors
    Features(FeaturesArgs),
    /// Greedy oracle extract for one cluster
    Oracle(OracleArgs),
    /// Score a single summary file against a reference directory
    Score(ScoreArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Directory of cluster directories
    #[arg(long)]
    corpus: PathBuf,
    /// Output model file (JSON)
    #[arg(long)]
    out: PathBuf,
    /// Gaussian prior variance (default 1.0; `inf` disables the prior)
    #[arg(long)]
    sigma2: Option<f64>,
    /// Constant similarity feature (default 0.3)
    #[arg(long)]
    rho: Option<f64>,
    /// Gradient infinity-norm tolerance (default 1e-6)
    #[arg(long)]
    tol: Option<f64>,
    /// Iteration cap (default 500)
    #[arg(long)]
    max_iter: Option<usize>,
    /// Plain gradient ascent instead of quasi-Newton
    #[arg(long)]
    plain_gd: bool,
    /// Byte budget used when building oracle extracts (default 665)
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MapMode {
    Literal,
    Nonneg,
}

impl From<MapMode> for dpp::GreedyMode {
    fn from(m: MapMode) -> Self {
        match m {
            MapMode::Literal => dpp::GreedyMode::Literal,
            MapMode::Nonneg => dpp::GreedyMode::NonNegGain,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SummarizeMethod {
    Greedy,
    Sampled,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Cluster directory
    #[arg(long)]
    cluster: PathBuf,
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    /// Byte budget (default 665)
    #[arg(long)]
    budget: Option<usize>,
    /// Inference method (default greedy)
    #[arg(long, value_enum, default_value_t = SummarizeMethod::Greedy)]
    method: SummarizeMethod,
    /// Greedy stopping rule (default literal)
    #[arg(long, value_enum, default_value_t = MapMode::Literal)]
    mode: MapMode,
    /// Sampler seed (sampled method; default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count (sampled method; default 100000)
    #[arg(long)]
    samples: Option<usize>,
    /// Cost window `lo,hi` for the sampled method (default 0,budget)
    #[arg(long)]
    window: Option<String>,
    /// Write the summary here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineMmrArgs {
    #[arg(long)]
    cluster: PathBuf,
    #[arg(long)]
    model: PathBuf,
    /// Relevance/diversity tradeoff between 0 and 1
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineBeginArgs {
    #[arg(long)]
    cluster: PathBuf,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of summary files named `<cluster-id>.txt`
    #[arg(long)]
    summaries: PathBuf,
    /// Corpus directory with the reference summaries
    #[arg(long)]
    corpus: PathBuf,
}

#[derive(Args)]
struct SampleArgs {
    /// Kernel matrix file
    #[arg(long)]
    kernel: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of subsets to draw (default 1)
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args)]
struct MapArgs {
    #[arg(long)]
    kernel: PathBuf,
    /// Cost file, one decimal per line
    #[arg(long)]
    costs: PathBuf,
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long, value_enum, default_value_t = MapMode::Literal)]
    mode: MapMode,
    /// Also run the exact enumeration oracle and report the ratio
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct MmrArgs {
    #[arg(long)]
    kernel: PathBuf,
    #[arg(long)]
    costs: PathBuf,
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
}

#[derive(Subcommand)]
enum DiagCommand {
    /// Emit realizable factor triples for a fixed 111 entry
    Slice(DiagSliceArgs),
    /// Print the ternary factor table for explicit parameters
    Table(DiagTableArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum DiagKind {
    Mrf,
    Dpp,
}

#[derive(Args)]
struct DiagSliceArgs {
    #[arg(long, value_enum)]
    kind: DiagKind,
    /// Target value of the 111 factor entry, in (0, 1]
    #[arg(long)]
    v111: f64,
    /// Grid resolution per parameter axis
    #[arg(long)]
    res: usize,
    /// Tolerance on the 111 entry (default 1e-3)
    #[arg(long)]
    tol: Option<f64>,
    /// Output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagTableArgs {
    #[arg(long, value_enum)]
    kind: DiagKind,
    /// Six comma-separated values: `w1,w2,w3,w12,w13,w23` for an MRF or
    /// `q1,q2,q3,S12,S13,S23` for a DPP
    #[arg(long)]
    params: String,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Model file to write (with --fit-bins) or read (without)
    #[arg(long)]
    model: PathBuf,
    /// Fit bin edges and the idf table, writing an untrained model file
    #[arg(long)]
    fit_bins: bool,
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    cluster: PathBuf,
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Metric {
    Rouge1f,
    Rouge2f,
}

#[derive(Args)]
struct ScoreArgs {
    /// Candidate summary file
    #[arg(long)]
    summary: PathBuf,
    /// Directory of reference `.txt` files
    #[arg(long)]
    refs: PathBuf,
    #[arg(long, value_enum, default_value_t = Metric::Rouge1f)]
    metric: Metric,
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        // A closed stdout (e.g. piping into `head`) is not a failure.
        if let CliError::Io(io) = &e {
            if io.kind() == std::io::ErrorKind::BrokenPipe {
                return;
            }
        }
        eprintln!("error: {e}");
        std::process::exit(e.code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file_config = config::FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Train(args) => commands::train(args, &file_config),
        Command::Summarize(args) => commands::summarize(args, &file_config),
        Command::BaselineMmr(args) => commands::baseline_mmr(args, &file_config),
        Command::BaselineBegin(args) => commands::baseline_begin(args, &file_config),
        Command::Eval(args) => commands::eval(args),
        Command::Sample(args) => commands::sample(args, &file_config),
        Command::Map(args) => commands::map(args, &file_config),
        Command::Mmr(args) => commands::mmr(args, &file_config),
        Command::Diag(DiagCommand::Slice(args)) => commands::diag_slice(args, &file_config),
        Command::Diag(DiagCommand::Table(args)) => commands::diag_table(args),
        Command::Features(args) => commands::features(args, &file_config),
        Command::Oracle(args) => commands::oracle(args, &file_config),
        Command::Score(args) => commands::score(args),
    }
}
