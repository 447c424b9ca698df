use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use mfc_core::corpus::{
    distinct_definienda, eval_embedding_benchmark, load_definitions, load_embeddings,
    load_ratings, load_stoplist, load_synonym_map, meaning_vectors_for_definitions,
    sample_definitions, Controls, CorpusError, DefinitionEntry,
};
use mfc_core::experiments::{
    corpus_matrices, fit_factor_model, marginal_quartiles, problematic_pairs, run_corpus_repeats,
    runs_csv, summary_csv, CorpusRunConfig, ExperimentError, Factor, SweepConfig, SweepGrid,
};
use mfc_core::metrics::DistanceMatrix;
use mfc_core::seed::derive_seed;
use mfc_core::stats::MantelConfig;
use serde::Serialize;

use crate::manifest::{
    CorpusInputs, EvalJob, Job, MfcJob, PairsJob, PairsSource, RunManifest, FILE_NAME,
};
use crate::{
    ControlArg, CorpusArgs, EvalArgs, MantelArgs, MfcArgs, PairsArgs, ReplayArgs, SweepArgs,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(_)
            | ExperimentError::TedAfterStopwords
            | ExperimentError::MissingParse(_)
            | ExperimentError::Corpus(CorpusError::Insufficient { .. }) => CliError::Usage(e.to_string()),
            other => CliError::Runtime(other.into()),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        ExperimentError::from(e).into()
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn absolute(path: &Path) -> Result<PathBuf, CliError> {
    std::path::absolute(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn require_files<'a>(paths: impl IntoIterator<Item = &'a Path>) -> Result<(), CliError> {
    for path in paths {
        if !path.is_file() {
            return Err(usage(format!("input file not found: {}", path.display())));
        }
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn mantel_config(args: &MantelArgs) -> MantelConfig {
    MantelConfig {
        method: args.method.into(),
        permutations: args.permutations as usize,
        alternative: args.alternative.into(),
        alpha: args.alpha,
        seed: args.seed,
    }
}

fn parse_levels(spec: &str) -> Result<Vec<usize>, String> {
    let mut levels = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let bad = || format!("bad level {part:?}");
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.parse().map_err(|_| bad())?;
                let hi: usize = hi.parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                levels.extend(lo..=hi);
            }
            None => levels.push(part.parse().map_err(|_| bad())?),
        }
    }
    levels.sort_unstable();
    levels.dedup();
    Ok(levels)
}

/// Applies `h=1,2 s=1 u=0-3 p=1` style overrides to the default grid.
pub fn parse_grid(tokens: &[String]) -> Result<SweepGrid, String> {
    let mut grid = SweepGrid::default();
    for token in tokens.iter().flat_map(|t| t.split_whitespace()) {
        let (name, values) = token
            .split_once('=')
            .ok_or_else(|| format!("grid entry {token:?} is not factor=levels"))?;
        let levels = parse_levels(values).map_err(|e| format!("grid entry {token:?}: {e}"))?;
        let slot = match name {
            "h" => &mut grid.holistic,
            "s" => &mut grid.synonyms,
            "u" => &mut grid.ungrounded,
            "p" => &mut grid.paraphrases,
            other => return Err(format!("unknown grid factor {other:?}; expected h, s, u or p")),
        };
        *slot = levels;
    }
    Ok(grid)
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let grid = parse_grid(&args.grid).map_err(usage)?;
    let include_baselines = if args.baselines {
        true
    } else {
        !args.no_baselines && args.grid.is_empty()
    };
    let config = SweepConfig {
        grid,
        concepts: args.concepts,
        order: args.order.into(),
        runs_per_config: args.runs as usize,
        include_baselines,
        mantel: mantel_config(&args.mantel),
        master_seed: args.mantel.seed,
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    execute(&RunManifest::new(absolute(&args.out)?, Job::Sweep { config }))
}

fn corpus_inputs(args: &CorpusArgs) -> Result<CorpusInputs, CliError> {
    let has = |c| args.controls.contains(&c);
    if has(ControlArg::Stopwords) && args.stoplist.is_none() {
        return Err(usage("--control stopwords requires --stoplist"));
    }
    if has(ControlArg::Synonyms) && args.synonym_map.is_none() {
        return Err(usage("--control synonyms requires --synonym-map"));
    }
    if has(ControlArg::Paraphrases) && args.sentences.is_some() {
        return Err(usage("--control paraphrases applies to definitions only"));
    }
    let opt = |p: &Option<PathBuf>| p.as_deref().map(absolute).transpose();
    Ok(CorpusInputs {
        definitions: opt(&args.definitions)?,
        sentences: opt(&args.sentences)?,
        embeddings: absolute(&args.embeddings)?,
        allowlist: opt(&args.allowlist)?,
        stoplist: if has(ControlArg::Stopwords) { opt(&args.stoplist)? } else { None },
        synonym_map: if has(ControlArg::Synonyms) { opt(&args.synonym_map)? } else { None },
        paraphrases: has(ControlArg::Paraphrases),
    })
}

pub fn mfc(args: MfcArgs) -> Result<(), CliError> {
    let inputs = corpus_inputs(&args.corpus)?;
    let config = CorpusRunConfig {
        meaning_metric: args.corpus.meaning_metric.into(),
        form_metric: args.corpus.form_metric.into(),
        sample_size: args.corpus.sample_size,
        repeats: args.repeats as usize,
        mantel: mantel_config(&args.mantel),
        master_seed: args.mantel.seed,
    };
    if inputs.stoplist.is_some() && config.form_metric.needs_trees() {
        return Err(ExperimentError::TedAfterStopwords.into());
    }
    config.mantel.validate().map_err(|e| usage(e.to_string()))?;
    let job = Job::Mfc(MfcJob { inputs, config });
    execute(&RunManifest::new(absolute(&args.out)?, job))
}

pub fn eval_embeddings(args: EvalArgs) -> Result<(), CliError> {
    let job = EvalJob {
        embeddings: absolute(&args.embeddings)?,
        ratings: absolute(&args.ratings)?,
        metric: args.metric.into(),
    };
    require_files([job.embeddings.as_path(), job.ratings.as_path()])?;
    let table = load_embeddings(&job.embeddings)?;
    let pairs = load_ratings(&job.ratings)?;
    let eval = eval_embedding_benchmark(&table, &pairs, job.metric).map_err(anyhow::Error::from)?;
    if args.json {
        print!("{}", to_json(&eval)?);
    } else {
        println!("rho\t{:.6}", eval.rho);
        println!("covered\t{}", eval.covered);
        println!("skipped\t{}", eval.skipped);
    }
    if let Some(out) = args.out {
        execute(&RunManifest::new(absolute(&out)?, Job::EvalEmbeddings(job)))?;
    }
    Ok(())
}

pub fn problem_pairs(args: PairsArgs) -> Result<(), CliError> {
    let source = match (&args.meaning_matrix, &args.form_matrix) {
        (Some(meaning), Some(form)) => PairsSource::Matrices {
            meaning: absolute(meaning)?,
            form: absolute(form)?,
        },
        _ => {
            if args.definitions.is_none() && args.sentences.is_none() {
                return Err(usage(
                    "give --meaning-matrix and --form-matrix, or a corpus (--definitions or --sentences)",
                ));
            }
            let embeddings = args
                .embeddings
                .clone()
                .ok_or_else(|| usage("corpus input requires --embeddings"))?;
            let corpus = CorpusArgs {
                definitions: args.definitions.clone(),
                sentences: args.sentences.clone(),
                embeddings,
                allowlist: args.allowlist.clone(),
                meaning_metric: args.meaning_metric,
                form_metric: args.form_metric,
                controls: args.controls.clone(),
                stoplist: args.stoplist.clone(),
                synonym_map: args.synonym_map.clone(),
                sample_size: args.sample_size,
            };
            let inputs = corpus_inputs(&corpus)?;
            let form_metric: mfc_core::metrics::FormMetric = args.form_metric.into();
            if inputs.stoplist.is_some() && form_metric.needs_trees() {
                return Err(ExperimentError::TedAfterStopwords.into());
            }
            PairsSource::Corpus {
                inputs,
                meaning_metric: args.meaning_metric.into(),
                form_metric,
                sample_size: args.sample_size,
                seed: args.seed,
            }
        }
    };
    let job = Job::ProblemPairs(PairsJob { source, k: args.k });
    execute(&RunManifest::new(absolute(&args.out)?, job))
}

pub fn replay(args: ReplayArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.manifest)
        .map_err(|e| usage(format!("reading {}: {e}", args.manifest.display())))?;
    let mut manifest = RunManifest::parse(&text).map_err(|e| usage(format!("{e:#}")))?;
    if let Some(out) = args.out {
        manifest.out = absolute(&out)?;
    }
    execute(&manifest)
}

/// Runs a manifest's job, writing outputs and the manifest into its `out`.
pub fn execute(manifest: &RunManifest) -> Result<(), CliError> {
    match &manifest.job {
        Job::Sweep { config } => config.validate().map_err(|e| usage(e.to_string()))?,
        Job::Mfc(job) => require_files(job.inputs.paths())?,
        Job::EvalEmbeddings(job) => require_files([job.embeddings.as_path(), job.ratings.as_path()])?,
        Job::ProblemPairs(job) => match &job.source {
            PairsSource::Matrices { meaning, form } => require_files([meaning.as_path(), form.as_path()])?,
            PairsSource::Corpus { inputs, .. } => require_files(inputs.paths())?,
        },
    }
    let out = &manifest.out;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    match &manifest.job {
        Job::Sweep { config } => run_sweep(config, out)?,
        Job::Mfc(job) => run_mfc(job, out)?,
        Job::EvalEmbeddings(job) => {
            let table = load_embeddings(&job.embeddings)?;
            let pairs = load_ratings(&job.ratings)?;
            let eval = eval_embedding_benchmark(&table, &pairs, job.metric).map_err(anyhow::Error::from)?;
            write_file(out, "eval.json", &to_json(&eval)?)?;
        }
        Job::ProblemPairs(job) => run_problem_pairs(job, out)?,
    }
    manifest.write(out)?;
    log::info!("wrote {}", out.join(FILE_NAME).display());
    Ok(())
}

fn run_sweep(config: &SweepConfig, out: &Path) -> Result<(), CliError> {
    let summaries = mfc_core::experiments::run_artificial_sweep(config)?;
    write_file(out, "runs.csv", &runs_csv(&summaries))?;
    write_file(out, "summary.csv", &summary_csv(&summaries))?;
    match fit_factor_model(&summaries) {
        Ok(fit) => {
            write_file(out, "factor_model.csv", &fit.to_csv())?;
            write_file(out, "factor_model.json", &to_json(&fit)?)?;
        }
        Err(e) => {
            log::warn!("factor model not fitted: {e}");
            write_file(out, "factor_model.csv", "predictor,estimate,std_error,t_value,p_value\n")?;
        }
    }
    let mut quartiles = String::from("factor,level,cells,q1,q2,q3\n");
    for factor in Factor::ALL {
        for m in marginal_quartiles(&summaries, factor) {
            let q = m.quartiles;
            let _ = writeln!(quartiles, "{},{},{},{},{},{}", factor.name(), m.level, m.cells, q.q1, q.q2, q.q3);
        }
    }
    write_file(out, "quartiles.csv", &quartiles)?;
    let significant = summaries.iter().filter(|s| s.significant).count();
    println!(
        "{} configurations, {} significant at alpha = {}; results in {}",
        summaries.len(),
        significant,
        config.mantel.alpha,
        out.display()
    );
    Ok(())
}

struct LoadedCorpus {
    entries: Vec<DefinitionEntry>,
    controls: Controls,
}

fn load_corpus(inputs: &CorpusInputs) -> Result<(LoadedCorpus, mfc_core::corpus::EmbeddingTable), CliError> {
    let allowlist: Option<HashSet<String>> = match &inputs.allowlist {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(text.split_whitespace().map(str::to_string).collect())
        }
        None => None,
    };
    let entries = load_definitions(inputs.items(), allowlist.as_ref())?;
    if entries.is_empty() {
        return Err(anyhow!("no items left after the allowlist filter").into());
    }
    let table = load_embeddings(&inputs.embeddings)?;
    let controls = Controls {
        stoplist: inputs.stoplist.as_deref().map(load_stoplist).transpose()?,
        synonyms: inputs.synonym_map.as_deref().map(load_synonym_map).transpose()?,
        paraphrases: inputs.paraphrases,
    };
    Ok((LoadedCorpus { entries, controls }, table))
}

#[derive(Serialize)]
struct CorpusSummary {
    repeats: usize,
    mean_r: f64,
    std_r: f64,
    mean_p: f64,
    r: Vec<f64>,
}

fn run_mfc(job: &MfcJob, out: &Path) -> Result<(), CliError> {
    let (corpus, table) = load_corpus(&job.inputs)?;
    let report = run_corpus_repeats(&corpus.entries, &table, &corpus.controls, &job.config)?;
    for outcome in &report.repeats {
        write_file(out, &format!("repeat_{:03}.json", outcome.repeat), &to_json(outcome)?)?;
    }
    let summary = CorpusSummary {
        repeats: report.repeats.len(),
        mean_r: report.mean_r,
        std_r: report.std_r,
        mean_p: report.mean_p,
        r: report.repeats.iter().map(|o| o.result.r).collect(),
    };
    write_file(out, "summary.json", &to_json(&summary)?)?;
    println!(
        "mean r = {:.6}, sd = {:.6}, mean p = {:.6} over {} repeats",
        summary.mean_r, summary.std_r, summary.mean_p, summary.repeats
    );
    Ok(())
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn read_matrix(path: &Path) -> Result<DistanceMatrix, CliError> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    DistanceMatrix::from_csv(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(CliError::Runtime)
}

fn run_problem_pairs(job: &PairsJob, out: &Path) -> Result<(), CliError> {
    let (meaning, form, items) = match &job.source {
        PairsSource::Matrices { meaning, form } => (read_matrix(meaning)?, read_matrix(form)?, None),
        PairsSource::Corpus {
            inputs,
            meaning_metric,
            form_metric,
            sample_size,
            seed,
        } => {
            let (corpus, table) = load_corpus(inputs)?;
            let n = sample_size.unwrap_or_else(|| distinct_definienda(&corpus.entries));
            let sampled = sample_definitions(&corpus.entries, n, !corpus.controls.paraphrases, derive_seed(&[*seed, 0]))?;
            let kept: Vec<DefinitionEntry> = sampled.iter().filter_map(|e| corpus.controls.apply(e)).collect();
            let aligned = meaning_vectors_for_definitions(&kept, &table)?;
            let (m, f) = corpus_matrices(&aligned.items, *meaning_metric, *form_metric)?;
            let entries: Vec<DefinitionEntry> = aligned.items.into_iter().map(|(e, _)| e).collect();
            (m, f, Some(entries))
        }
    };
    let total = meaning.values().len();
    if job.k > total {
        return Err(usage(format!("--k {} exceeds the {total} available pairs", job.k)));
    }
    let ranked = problematic_pairs(&meaning, &form, job.k)?;
    let mut csv = String::from("rank,index_a,index_b,meaning_rank,form_rank,rank_gap,key_a,key_b,text_a,text_b\n");
    for (rank, pair) in ranked.iter().enumerate() {
        let (key_a, key_b, text_a, text_b) = match &items {
            Some(entries) => {
                let (a, b) = (&entries[pair.index_a], &entries[pair.index_b]);
                (
                    csv_field(&a.definiendum),
                    csv_field(&b.definiendum),
                    csv_field(&a.gloss.join(" ")),
                    csv_field(&b.gloss.join(" ")),
                )
            }
            None => Default::default(),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{key_a},{key_b},{text_a},{text_b}",
            rank + 1,
            pair.index_a,
            pair.index_b,
            pair.meaning_rank,
            pair.form_rank,
            pair.rank_gap
        );
    }
    write_file(out, "pairs.csv", &csv)?;
    println!("{} pairs written to {}", ranked.len(), out.join("pairs.csv").display());
    Ok(())
}
