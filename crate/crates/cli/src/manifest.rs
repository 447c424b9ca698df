use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use mfc_core::experiments::{CorpusRunConfig, SweepConfig};
use mfc_core::metrics::{FormMetric, VectorMetric};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const FILE_NAME: &str = "manifest.json";

/// Everything needed to re-run a command and reproduce its outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub out: PathBuf,
    pub job: Job,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Sweep { config: SweepConfig },
    Mfc(MfcJob),
    EvalEmbeddings(EvalJob),
    ProblemPairs(PairsJob),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusInputs {
    pub definitions: Option<PathBuf>,
    pub sentences: Option<PathBuf>,
    pub embeddings: PathBuf,
    pub allowlist: Option<PathBuf>,
    pub stoplist: Option<PathBuf>,
    pub synonym_map: Option<PathBuf>,
    pub paraphrases: bool,
}

impl CorpusInputs {
    pub fn items(&self) -> &Path {
        self.definitions
            .as_deref()
            .or(self.sentences.as_deref())
            .expect("one of definitions or sentences is set")
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        [
            self.definitions.as_deref(),
            self.sentences.as_deref(),
            Some(self.embeddings.as_path()),
            self.allowlist.as_deref(),
            self.stoplist.as_deref(),
            self.synonym_map.as_deref(),
        ]
        .into_iter()
        .flatten()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MfcJob {
    pub inputs: CorpusInputs,
    pub config: CorpusRunConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalJob {
    pub embeddings: PathBuf,
    pub ratings: PathBuf,
    pub metric: VectorMetric,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairsJob {
    pub source: PairsSource,
    pub k: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairsSource {
    Matrices {
        meaning: PathBuf,
        form: PathBuf,
    },
    Corpus {
        inputs: CorpusInputs,
        meaning_metric: VectorMetric,
        form_metric: FormMetric,
        sample_size: Option<usize>,
        seed: u64,
    },
}

impl RunManifest {
    pub fn new(out: PathBuf, job: Job) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            out,
            job,
        }
    }

    pub fn write(&self, dir: &Path) -> anyhow::Result<()> {
        let path = dir.join(FILE_NAME);
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).context("manifest is not JSON")?;
        let version = value.get("schema_version").and_then(|v| v.as_u64());
        if version != Some(SCHEMA_VERSION as u64) {
            anyhow::bail!("unsupported manifest schema_version {version:?}, expected {SCHEMA_VERSION}");
        }
        serde_json::from_value(value).context("malformed manifest")
    }
}
