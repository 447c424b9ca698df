//! `mfc`: batch driver for meaning-form correlation experiments.
//!
//! Exit codes: 0 on success, 1 on runtime failure, 2 on usage errors.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfc_core::langgen::GroundedOrder;
use mfc_core::metrics::{FormMetric, VectorMetric};
use mfc_core::stats::{Alternative, CorrelationMethod};

use crate::commands::CliError;

#[derive(Parser, Debug)]
#[command(name = "mfc", version, about = "Meaning-form correlation experiments")]
struct Cli {
    /// Worker threads (defaults to available parallelism).
    #[arg(long, global = true, env = "MFC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Artificial-language sweep over the h/s/u/p grid.
    Sweep(SweepArgs),
    /// MFC of a definition or sentence corpus against embedding vectors.
    Mfc(MfcArgs),
    /// Spearman correlation of embedding distances with human ratings.
    EvalEmbeddings(EvalArgs),
    /// Item pairs whose meaning and form distance ranks disagree most.
    ProblemPairs(PairsArgs),
    /// Re-run a command from the manifest.json it wrote.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone)]
pub struct MantelArgs {
    /// Permutations per Mantel test.
    #[arg(long, default_value_t = 9999, value_parser = clap::value_parser!(u64).range(99..))]
    pub permutations: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Pearson)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = AlternativeArg::Greater)]
    pub alternative: AlternativeArg,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Grid levels as `factor=v1,v2,..` for factors h, s, u, p; unspecified
    /// factors keep their full default range.
    #[arg(long, num_args = 1..)]
    pub grid: Vec<String>,
    /// Languages generated per grid cell.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u64).range(1..))]
    pub runs: u64,
    #[arg(long, default_value_t = 5)]
    pub concepts: usize,
    /// Arrangement of grounded expressions within messages.
    #[arg(long, value_enum, default_value_t = OrderArg::PerMeaning)]
    pub order: OrderArg,
    /// Add the two random baselines (default only without --grid).
    #[arg(long, conflicts_with = "no_baselines")]
    pub baselines: bool,
    #[arg(long)]
    pub no_baselines: bool,
    #[command(flatten)]
    pub mantel: MantelArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct CorpusArgs {
    /// Definitions TSV: definiendum, gloss, optional bracketed parse.
    #[arg(long, conflicts_with = "sentences", required_unless_present = "sentences")]
    pub definitions: Option<PathBuf>,
    /// Sentences TSV: sentence id, sentence, optional bracketed parse.
    #[arg(long)]
    pub sentences: Option<PathBuf>,
    /// Embedding text file keyed by definiendum or sentence id.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Keep only items whose key is listed (one per line).
    #[arg(long)]
    pub allowlist: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MeaningMetricArg::Cosine)]
    pub meaning_metric: MeaningMetricArg,
    #[arg(long, value_enum, default_value_t = FormMetricArg::Levenshtein)]
    pub form_metric: FormMetricArg,
    #[arg(long = "control", value_enum)]
    pub controls: Vec<ControlArg>,
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    #[arg(long)]
    pub synonym_map: Option<PathBuf>,
    /// Items per sample (default: number of distinct keys).
    #[arg(long)]
    pub sample_size: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MfcArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    #[command(flatten)]
    pub mantel: MantelArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    /// Ratings file: item_a, item_b, score.
    #[arg(long)]
    pub ratings: PathBuf,
    #[arg(long, value_enum, default_value_t = MeaningMetricArg::Cosine)]
    pub metric: MeaningMetricArg,
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Also write eval.json and manifest.json here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PairsArgs {
    /// Meaning distance matrix CSV (condensed or square).
    #[arg(long, requires = "form_matrix", conflicts_with_all = ["definitions", "sentences"])]
    pub meaning_matrix: Option<PathBuf>,
    #[arg(long, requires = "meaning_matrix")]
    pub form_matrix: Option<PathBuf>,
    #[arg(long)]
    pub definitions: Option<PathBuf>,
    #[arg(long, conflicts_with = "definitions")]
    pub sentences: Option<PathBuf>,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub allowlist: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MeaningMetricArg::Cosine)]
    pub meaning_metric: MeaningMetricArg,
    #[arg(long, value_enum, default_value_t = FormMetricArg::Levenshtein)]
    pub form_metric: FormMetricArg,
    #[arg(long = "control", value_enum)]
    pub controls: Vec<ControlArg>,
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    #[arg(long)]
    pub synonym_map: Option<PathBuf>,
    #[arg(long)]
    pub sample_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of pairs to report.
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Output directory (default: the one recorded in the manifest).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MethodArg {
    Pearson,
    Spearman,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum AlternativeArg {
    Greater,
    TwoSided,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum OrderArg {
    Fixed,
    PerMeaning,
    PerMessage,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MeaningMetricArg {
    Cosine,
    Euclidean,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum FormMetricArg {
    Levenshtein,
    LevenshteinNorm,
    Ted,
    TedNorm,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlArg {
    Stopwords,
    Synonyms,
    Paraphrases,
}

impl From<MethodArg> for CorrelationMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Pearson => CorrelationMethod::Pearson,
            MethodArg::Spearman => CorrelationMethod::Spearman,
        }
    }
}

impl From<AlternativeArg> for Alternative {
    fn from(a: AlternativeArg) -> Self {
        match a {
            AlternativeArg::Greater => Alternative::Greater,
            AlternativeArg::TwoSided => Alternative::TwoSided,
        }
    }
}

impl From<OrderArg> for GroundedOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Fixed => GroundedOrder::Fixed,
            OrderArg::PerMeaning => GroundedOrder::PerMeaning,
            OrderArg::PerMessage => GroundedOrder::PerMessage,
        }
    }
}

impl From<MeaningMetricArg> for VectorMetric {
    fn from(m: MeaningMetricArg) -> Self {
        match m {
            MeaningMetricArg::Cosine => VectorMetric::Cosine,
            MeaningMetricArg::Euclidean => VectorMetric::Euclidean,
        }
    }
}

impl From<FormMetricArg> for FormMetric {
    fn from(m: FormMetricArg) -> Self {
        match m {
            FormMetricArg::Levenshtein => FormMetric::Levenshtein,
            FormMetricArg::LevenshteinNorm => FormMetric::LevenshteinNorm,
            FormMetricArg::Ted => FormMetric::Ted,
            FormMetricArg::TedNorm => FormMetric::TedNorm,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Runtime(e.into()))?;
    }
    match cli.command {
        Command::Sweep(args) => commands::sweep(args),
        Command::Mfc(args) => commands::mfc(args),
        Command::EvalEmbeddings(args) => commands::eval_embeddings(args),
        Command::ProblemPairs(args) => commands::problem_pairs(args),
        Command::Replay(args) => commands::replay(args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
