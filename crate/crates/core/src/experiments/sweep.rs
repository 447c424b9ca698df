use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::langgen::{
    generate_language, generate_random_baseline, BaselineKind, GroundedOrder, Language, LanguageSpec,
    DEFAULT_CONCEPTS,
};
use crate::metrics::{hamming, levenshtein_normalized, pairwise_matrix};
use crate::seed::derive_seed;
use crate::stats::{mantel, MantelConfig, MantelResult};

/// Parameter levels to cross.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub holistic: Vec<usize>,
    pub synonyms: Vec<usize>,
    pub ungrounded: Vec<usize>,
    pub paraphrases: Vec<usize>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            holistic: (1..=5).collect(),
            synonyms: (1..=3).collect(),
            ungrounded: (0..=3).collect(),
            paraphrases: (1..=3).collect(),
        }
    }
}

impl SweepGrid {
    pub fn single(holistic: usize, synonyms: usize, ungrounded: usize, paraphrases: usize) -> Self {
        Self {
            holistic: vec![holistic],
            synonyms: vec![synonyms],
            ungrounded: vec![ungrounded],
            paraphrases: vec![paraphrases],
        }
    }

    /// Grid points, `p` varying fastest.
    pub fn keys(&self) -> Vec<ConfigKey> {
        let mut keys = Vec::new();
        for &holistic in &self.holistic {
            for &synonyms in &self.synonyms {
                for &ungrounded in &self.ungrounded {
                    for &paraphrases in &self.paraphrases {
                        keys.push(ConfigKey::Grid {
                            holistic,
                            synonyms,
                            ungrounded,
                            paraphrases,
                        });
                    }
                }
            }
        }
        keys
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub grid: SweepGrid,
    pub concepts: usize,
    #[serde(default)]
    pub order: GroundedOrder,
    pub runs_per_config: usize,
    pub include_baselines: bool,
    /// Test settings shared by all runs; its seed is replaced per run.
    pub mantel: MantelConfig,
    pub master_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            grid: SweepGrid::default(),
            concepts: DEFAULT_CONCEPTS,
            order: GroundedOrder::default(),
            runs_per_config: 50,
            include_baselines: true,
            mantel: MantelConfig::default(),
            master_seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let g = &self.grid;
        if g.holistic.is_empty() || g.synonyms.is_empty() || g.ungrounded.is_empty() || g.paraphrases.is_empty() {
            return Err(ExperimentError::Config("every grid dimension needs at least one level".into()));
        }
        if self.runs_per_config == 0 {
            return Err(ExperimentError::Config("runs per config must be at least 1".into()));
        }
        self.mantel.validate()?;
        for key in g.keys() {
            if let ConfigKey::Grid { .. } = key {
                key.spec(self.concepts, self.order, 0).expect("grid key").validate()?;
            }
        }
        Ok(())
    }

    pub fn keys(&self) -> Vec<ConfigKey> {
        let mut keys = self.grid.keys();
        if self.include_baselines {
            keys.extend(BaselineKind::ALL.map(ConfigKey::Baseline));
        }
        keys
    }
}

/// One cell of the sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfigKey {
    Grid {
        holistic: usize,
        synonyms: usize,
        ungrounded: usize,
        paraphrases: usize,
    },
    Baseline(BaselineKind),
}

impl ConfigKey {
    pub fn grid(holistic: usize, synonyms: usize, ungrounded: usize, paraphrases: usize) -> Self {
        ConfigKey::Grid {
            holistic,
            synonyms,
            ungrounded,
            paraphrases,
        }
    }

    /// `h1_s1_u0_p1`, or the baseline name.
    pub fn label(&self) -> String {
        match self {
            ConfigKey::Grid {
                holistic,
                synonyms,
                ungrounded,
                paraphrases,
            } => format!("h{holistic}_s{synonyms}_u{ungrounded}_p{paraphrases}"),
            ConfigKey::Baseline(kind) => kind.name().to_string(),
        }
    }

    /// `[h, s, u, p]` for grid cells.
    pub fn levels(&self) -> Option<[usize; 4]> {
        match *self {
            ConfigKey::Grid {
                holistic,
                synonyms,
                ungrounded,
                paraphrases,
            } => Some([holistic, synonyms, ungrounded, paraphrases]),
            ConfigKey::Baseline(_) => None,
        }
    }

    pub fn spec(&self, concepts: usize, order: GroundedOrder, seed: u64) -> Option<LanguageSpec> {
        self.levels().map(|[h, s, u, p]| LanguageSpec {
            concepts,
            holistic: h,
            synonyms: s,
            ungrounded: u,
            paraphrases: p,
            order,
            seed,
        })
    }

    fn seed_words(&self) -> [u64; 5] {
        match *self {
            ConfigKey::Grid {
                holistic,
                synonyms,
                ungrounded,
                paraphrases,
            } => [0, holistic as u64, synonyms as u64, ungrounded as u64, paraphrases as u64],
            ConfigKey::Baseline(BaselineKind::FixedLength) => [1, 0, 0, 0, 0],
            ConfigKey::Baseline(BaselineKind::VariableLength) => [2, 0, 0, 0, 0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub n_items: usize,
    pub result: Option<MantelResult>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Quartiles {
    /// Linear-interpolation quantiles (position `(n − 1)·q` in sorted data).
    pub fn of(values: &[f64]) -> Option<Quartiles> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let at = |q: f64| {
            let pos = (sorted.len() - 1) as f64 * q;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
        };
        Some(Quartiles {
            q1: at(0.25),
            q2: at(0.5),
            q3: at(0.75),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub key: ConfigKey,
    pub runs: Vec<RunRecord>,
    pub completed: usize,
    pub failed: usize,
    pub mean_r: Option<f64>,
    pub mean_p: Option<f64>,
    pub r_quartiles: Option<Quartiles>,
    /// Mean p-value below alpha. Cells with no completed run are not significant.
    pub significant: bool,
}

impl ConfigSummary {
    pub fn results(&self) -> impl Iterator<Item = &MantelResult> {
        self.runs.iter().filter_map(|r| r.result.as_ref())
    }
}

/// Averages the completed runs; failed runs are only counted.
pub fn aggregate_runs(key: ConfigKey, runs: Vec<RunRecord>, alpha: f64) -> ConfigSummary {
    let rs: Vec<f64> = runs.iter().filter_map(|r| r.result.map(|m| m.r)).collect();
    let ps: Vec<f64> = runs.iter().filter_map(|r| r.result.map(|m| m.p_value)).collect();
    let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let mean_p = mean(&ps);
    ConfigSummary {
        key,
        completed: rs.len(),
        failed: runs.len() - rs.len(),
        mean_r: mean(&rs),
        mean_p,
        r_quartiles: Quartiles::of(&rs),
        significant: mean_p.is_some_and(|p| p < alpha),
        runs,
    }
}

/// Mantel test of Hamming meaning distances against normalized Levenshtein
/// message distances.
pub fn measure_language(lang: &Language, cfg: &MantelConfig) -> Result<MantelResult, ExperimentError> {
    let meanings: Vec<_> = lang.meanings().collect();
    let messages: Vec<_> = lang.messages().collect();
    let meaning_dm = pairwise_matrix(&meanings, |a, b| Ok(hamming(a, b)? as f64))?;
    let form_dm = pairwise_matrix(&messages, |a, b| {
        Ok(levenshtein_normalized(a.tokens(), b.tokens()))
    })?;
    Ok(mantel(&meaning_dm, &form_dm, cfg)?)
}

fn run_one(cfg: &SweepConfig, key: ConfigKey, run: usize) -> RunRecord {
    let mut words = vec![cfg.master_seed];
    words.extend(key.seed_words());
    words.push(run as u64);
    let seed = derive_seed(&words);
    let mantel_cfg = MantelConfig {
        seed: derive_seed(&[seed, 1]),
        ..cfg.mantel
    };
    let language = match key {
        ConfigKey::Grid { .. } => generate_language(&key.spec(cfg.concepts, cfg.order, seed).expect("grid key")),
        ConfigKey::Baseline(kind) => generate_random_baseline(kind, cfg.concepts, seed),
    };
    let (n_items, outcome) = match language {
        Ok(lang) => (lang.len(), measure_language(&lang, &mantel_cfg)),
        Err(e) => (0, Err(e.into())),
    };
    RunRecord {
        run,
        seed,
        n_items,
        result: outcome.as_ref().ok().copied(),
        error: outcome.err().map(|e| e.to_string()),
    }
}

/// Runs every (cell, run) pair in parallel and aggregates per cell. Results
/// depend only on the config, not on the worker count.
pub fn run_artificial_sweep(cfg: &SweepConfig) -> Result<Vec<ConfigSummary>, ExperimentError> {
    cfg.validate()?;
    let keys = cfg.keys();
    let units: Vec<(usize, usize)> = (0..keys.len())
        .flat_map(|k| (0..cfg.runs_per_config).map(move |run| (k, run)))
        .collect();
    let records: Vec<RunRecord> = units
        .par_iter()
        .map(|&(k, run)| run_one(cfg, keys[k], run))
        .collect();
    let mut chunks = records.chunks(cfg.runs_per_config);
    Ok(keys
        .into_iter()
        .map(|key| {
            let runs = chunks.next().expect("one chunk per key").to_vec();
            for failed in runs.iter().filter(|r| r.error.is_some()) {
                log::debug!("{} run {}: {}", key.label(), failed.run, failed.error.as_deref().unwrap_or(""));
            }
            aggregate_runs(key, runs, cfg.mantel.alpha)
        })
        .collect())
}

fn level_cells(key: &ConfigKey) -> String {
    match key.levels() {
        Some([h, s, u, p]) => format!("{h},{s},{u},{p}"),
        None => ",,,".to_string(),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per (cell, run), long format.
pub fn runs_csv(summaries: &[ConfigSummary]) -> String {
    let mut out = String::from("config,h,s,u,p,run,seed,n_items,r,p_value,z,error\n");
    for summary in summaries {
        for run in &summary.runs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                summary.key.label(),
                level_cells(&summary.key),
                run.run,
                run.seed,
                run.n_items,
                opt(run.result.map(|m| m.r)),
                opt(run.result.map(|m| m.p_value)),
                opt(run.result.map(|m| m.z_score)),
                run.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
            );
        }
    }
    out
}

/// One row per cell.
pub fn summary_csv(summaries: &[ConfigSummary]) -> String {
    let mut out =
        String::from("config,h,s,u,p,completed,failed,mean_r,mean_p,q1,q2,q3,significant\n");
    for s in summaries {
        let q = s.r_quartiles;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            s.key.label(),
            level_cells(&s.key),
            s.completed,
            s.failed,
            opt(s.mean_r),
            opt(s.mean_p),
            opt(q.map(|q| q.q1)),
            opt(q.map(|q| q.q2)),
            opt(q.map(|q| q.q3)),
            s.significant,
        );
    }
    out
}
