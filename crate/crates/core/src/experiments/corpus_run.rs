use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::corpus::{
    distinct_definienda, meaning_vectors_for_definitions, sample_definitions, Controls,
    DefinitionEntry, EmbeddingTable,
};
use crate::metrics::{
    levenshtein, levenshtein_normalized, pairwise_matrix, ted, ted_normalized, DistanceMatrix,
    FormMetric, MetricError, VectorMetric,
};
use crate::seed::derive_seed;
use crate::stats::{mantel, MantelConfig, MantelResult};

/// Builds both distance matrices and runs the Mantel test, meanings first.
pub fn mfc_for_corpus<M, F, DM, DF>(
    meanings: &[M],
    forms: &[F],
    meaning_metric: DM,
    form_metric: DF,
    cfg: &MantelConfig,
) -> Result<MantelResult, ExperimentError>
where
    M: Sync,
    F: Sync,
    DM: Fn(&M, &M) -> Result<f64, MetricError> + Sync,
    DF: Fn(&F, &F) -> Result<f64, MetricError> + Sync,
{
    if meanings.len() != forms.len() {
        return Err(ExperimentError::Config(format!(
            "{} meanings but {} forms",
            meanings.len(),
            forms.len()
        )));
    }
    let meaning_dm = pairwise_matrix(meanings, meaning_metric)?;
    let form_dm = pairwise_matrix(forms, form_metric)?;
    Ok(mantel(&meaning_dm, &form_dm, cfg)?)
}

/// Meaning and form matrices for aligned corpus items.
pub fn corpus_matrices(
    items: &[(DefinitionEntry, Vec<f64>)],
    meaning_metric: VectorMetric,
    form_metric: FormMetric,
) -> Result<(DistanceMatrix, DistanceMatrix), ExperimentError> {
    let vectors: Vec<&[f64]> = items.iter().map(|(_, v)| v.as_slice()).collect();
    let meaning_dm = pairwise_matrix(&vectors, |a, b| meaning_metric.distance(a, b))?;
    let form_dm = if form_metric.needs_trees() {
        let trees = items
            .iter()
            .enumerate()
            .map(|(i, (e, _))| e.parse.as_ref().ok_or(ExperimentError::MissingParse(i)))
            .collect::<Result<Vec<_>, _>>()?;
        match form_metric {
            FormMetric::Ted => pairwise_matrix(&trees, |a, b| Ok(ted(a, b) as f64))?,
            _ => pairwise_matrix(&trees, |a, b| Ok(ted_normalized(a, b)))?,
        }
    } else {
        let glosses: Vec<&[String]> = items.iter().map(|(e, _)| e.gloss.as_slice()).collect();
        match form_metric {
            FormMetric::Levenshtein => pairwise_matrix(&glosses, |a, b| Ok(levenshtein(a, b) as f64))?,
            _ => pairwise_matrix(&glosses, |a, b| Ok(levenshtein_normalized(a, b)))?,
        }
    };
    Ok((meaning_dm, form_dm))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusRunConfig {
    pub meaning_metric: VectorMetric,
    pub form_metric: FormMetric,
    /// Items per repeat; defaults to the number of distinct keys.
    pub sample_size: Option<usize>,
    pub repeats: usize,
    pub mantel: MantelConfig,
    pub master_seed: u64,
}

impl Default for CorpusRunConfig {
    fn default() -> Self {
        Self {
            meaning_metric: VectorMetric::Cosine,
            form_metric: FormMetric::Levenshtein,
            sample_size: None,
            repeats: 5,
            mantel: MantelConfig::default(),
            master_seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatOutcome {
    pub repeat: usize,
    pub seed: u64,
    pub sampled: usize,
    /// Items removed because a control emptied their form.
    pub dropped_empty: usize,
    /// Items removed because their key has no vector.
    pub dropped_oov: usize,
    pub result: MantelResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub repeats: Vec<RepeatOutcome>,
    pub mean_r: f64,
    /// Sample standard deviation over repeats (0 for a single repeat).
    pub std_r: f64,
    pub mean_p: f64,
}

/// Sample, apply controls, align with vectors and measure, once per repeat.
pub fn run_corpus_repeats(
    entries: &[DefinitionEntry],
    table: &EmbeddingTable,
    controls: &Controls,
    cfg: &CorpusRunConfig,
) -> Result<CorpusReport, ExperimentError> {
    if controls.stoplist.is_some() && cfg.form_metric.needs_trees() {
        return Err(ExperimentError::TedAfterStopwords);
    }
    if cfg.repeats == 0 {
        return Err(ExperimentError::Config("repeats must be at least 1".into()));
    }
    cfg.mantel.validate()?;
    let n = cfg.sample_size.unwrap_or_else(|| distinct_definienda(entries));

    let mut repeats = Vec::with_capacity(cfg.repeats);
    for repeat in 0..cfg.repeats {
        let seed = derive_seed(&[cfg.master_seed, repeat as u64]);
        let sampled = sample_definitions(entries, n, !controls.paraphrases, seed)?;
        let transformed: Vec<DefinitionEntry> = sampled.iter().filter_map(|e| controls.apply(e)).collect();
        let dropped_empty = sampled.len() - transformed.len();
        let aligned = meaning_vectors_for_definitions(&transformed, table)?;
        let (meaning_dm, form_dm) = corpus_matrices(&aligned.items, cfg.meaning_metric, cfg.form_metric)?;
        let mantel_cfg = MantelConfig {
            seed: derive_seed(&[seed, 1]),
            ..cfg.mantel
        };
        let result = mantel(&meaning_dm, &form_dm, &mantel_cfg)?;
        log::info!("repeat {repeat}: r = {:.4}, p = {:.4}", result.r, result.p_value);
        repeats.push(RepeatOutcome {
            repeat,
            seed,
            sampled: sampled.len(),
            dropped_empty,
            dropped_oov: aligned.dropped,
            result,
        });
    }
    let count = repeats.len() as f64;
    let mean_r = repeats.iter().map(|o| o.result.r).sum::<f64>() / count;
    let mean_p = repeats.iter().map(|o| o.result.p_value).sum::<f64>() / count;
    let std_r = if repeats.len() > 1 {
        (repeats.iter().map(|o| (o.result.r - mean_r).powi(2)).sum::<f64>() / (count - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(CorpusReport {
        repeats,
        mean_r,
        std_r,
        mean_p,
    })
}
