//! Experiment drivers: the artificial-language sweep and its factor model,
//! corpus-level MFC runs, and rank-gap diagnostics.

mod corpus_run;
mod diagnostics;
mod factor;
mod sweep;

use thiserror::Error;

use crate::corpus::CorpusError;
use crate::langgen::LangError;
use crate::metrics::MetricError;
use crate::stats::StatsError;

pub use corpus_run::{
    corpus_matrices, mfc_for_corpus, run_corpus_repeats, CorpusReport, CorpusRunConfig,
    RepeatOutcome,
};
pub use diagnostics::{problematic_pairs, RankedPair};
pub use factor::{fit_factor_model, marginal_quartiles, Factor, MarginalQuartiles};
pub use sweep::{
    aggregate_runs, measure_language, run_artificial_sweep, runs_csv, summary_csv, ConfigKey,
    ConfigSummary, Quartiles, RunRecord, SweepConfig, SweepGrid,
};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("tree-based form metrics are not computed after stop-word removal")]
    TedAfterStopwords,
    #[error("item {0} has no parse tree but a tree metric was requested")]
    MissingParse(usize),
    #[error("no completed runs to fit")]
    NoData,
}
