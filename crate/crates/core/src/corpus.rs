//! Natural-language inputs: definition or sentence corpora, embedding tables,
//! rating benchmarks, and the stop-word / synonym controls.
//!
//! All inputs are UTF-8 text. Tokenization is whitespace splitting; token case
//! is kept for form distances and folded only when matching against the
//! stoplist or the synonym lexicon.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::seq::IndexedRandom;
use thiserror::Error;

use crate::metrics::{parse_bracketed, MetricError, ParseTree, VectorMetric};
use crate::seed::rng_from_seed;
use crate::stats::{spearman, StatsError};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("{0} is empty")]
    Empty(&'static str),
    #[error("requested {requested} items but only {available} are available")]
    Insufficient { requested: usize, available: usize },
    #[error("only {covered} rated pairs are covered by the table ({skipped} skipped); need 3")]
    TooFewCovered { covered: usize, skipped: usize },
    #[error("no entry has a vector in the embedding table")]
    AllDropped,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn malformed(line: usize, reason: impl Into<String>) -> CorpusError {
    CorpusError::Malformed {
        line,
        reason: reason.into(),
    }
}

/// One form-meaning item: a dictionary definition, or a sentence keyed by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefinitionEntry {
    /// The defined word (or the sentence id); used to look up the meaning vector.
    pub definiendum: String,
    pub gloss: Vec<String>,
    pub parse: Option<ParseTree>,
}

/// Reads `definiendum<TAB>gloss[<TAB>bracketed parse]` rows. Blank lines are
/// ignored. With an allowlist, rows whose definiendum is not listed are dropped.
pub fn parse_definitions(
    text: &str,
    allowlist: Option<&HashSet<String>>,
) -> Result<Vec<DefinitionEntry>, CorpusError> {
    let mut entries = Vec::new();
    let mut rows = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        rows += 1;
        let fields: Vec<&str> = raw.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(malformed(line, format!("expected 2 or 3 tab-separated fields, got {}", fields.len())));
        }
        let definiendum = fields[0].trim();
        if definiendum.is_empty() || definiendum.split_whitespace().count() != 1 {
            return Err(malformed(line, "definiendum must be a single token"));
        }
        let gloss: Vec<String> = fields[1].split_whitespace().map(str::to_string).collect();
        if gloss.is_empty() {
            return Err(malformed(line, "empty gloss"));
        }
        let parse = match fields.get(2).map(|f| f.trim()) {
            Some(tree) if !tree.is_empty() => Some(
                parse_bracketed(tree).map_err(|e| malformed(line, format!("parse tree: {e}")))?,
            ),
            _ => None,
        };
        if allowlist.is_some_and(|allowed| !allowed.contains(definiendum)) {
            continue;
        }
        entries.push(DefinitionEntry {
            definiendum: definiendum.to_string(),
            gloss,
            parse,
        });
    }
    if rows == 0 {
        return Err(CorpusError::Empty("definitions file"));
    }
    Ok(entries)
}

pub fn load_definitions(
    path: &Path,
    allowlist: Option<&HashSet<String>>,
) -> Result<Vec<DefinitionEntry>, CorpusError> {
    parse_definitions(&read(path)?, allowlist)
}

/// Number of distinct definienda, in first-appearance order.
pub fn distinct_definienda(entries: &[DefinitionEntry]) -> usize {
    entries
        .iter()
        .map(|e| e.definiendum.as_str())
        .collect::<HashSet<_>>()
        .len()
}

/// Uniform sample of `n` entries without replacement, returned in input
/// order. With `one_per_definiendum`, one gloss is first drawn uniformly for
/// every definiendum and the sample is taken among those.
pub fn sample_definitions(
    entries: &[DefinitionEntry],
    n: usize,
    one_per_definiendum: bool,
    seed: u64,
) -> Result<Vec<DefinitionEntry>, CorpusError> {
    let mut rng = rng_from_seed(seed);
    let pool: Vec<usize> = if one_per_definiendum {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<&str, usize> = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            let g = *slot.entry(e.definiendum.as_str()).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[g].push(i);
        }
        groups
            .iter()
            .map(|g| *g.choose(&mut rng).expect("groups are non-empty"))
            .collect()
    } else {
        (0..entries.len()).collect()
    };
    if n > pool.len() {
        return Err(CorpusError::Insufficient {
            requested: n,
            available: pool.len(),
        });
    }
    let mut picked: Vec<usize> = sample(&mut rng, pool.len(), n)
        .into_iter()
        .map(|k| pool[k])
        .collect();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| entries[i].clone()).collect())
}

/// Token-to-vector table with a fixed dimension.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    tokens: Vec<String>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            ..Self::default()
        }
    }

    pub fn insert(&mut self, token: String, vector: Vec<f64>) -> Result<(), String> {
        if vector.len() != self.dimension {
            return Err(format!(
                "vector for {token:?} has {} components, expected {}",
                vector.len(),
                self.dimension
            ));
        }
        if self.index.contains_key(&token) {
            return Err(format!("duplicate token {token:?}"));
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.vectors.push(vector);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| self.vectors[i].as_slice())
    }

    /// Exact match first, then the lowercased token.
    pub fn lookup(&self, token: &str) -> Option<&[f64]> {
        self.get(token).or_else(|| self.get(&token.to_lowercase()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.tokens
            .iter()
            .zip(&self.vectors)
            .map(|(t, v)| (t.as_str(), v.as_slice()))
    }

    /// Text layout with a `<count> <dim>` header line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.len(), self.dimension);
        for (token, vector) in self.iter() {
            out.push_str(token);
            for v in vector {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses `token v1 .. vd` lines, with an optional `<count> <dim>` first
    /// line. Without a header the first vector fixes the dimension.
    pub fn from_text(text: &str) -> Result<Self, CorpusError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .peekable();
        let mut declared: Option<(usize, usize)> = None;
        if let Some((_, first)) = lines.peek() {
            let fields: Vec<&str> = first.split_whitespace().collect();
            if let [count, dim] = fields[..] {
                if let (Ok(count), Ok(dim)) = (count.parse::<usize>(), dim.parse::<usize>()) {
                    declared = Some((count, dim));
                    lines.next();
                }
            }
        }
        let mut table: Option<EmbeddingTable> = declared.map(|(_, dim)| EmbeddingTable::new(dim));
        for (idx, raw) in lines {
            let line = idx + 1;
            let mut fields = raw.split_whitespace();
            let token = fields.next().expect("line is not blank").to_string();
            let vector = fields
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| malformed(line, format!("non-numeric field {f:?}")))
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let table = table.get_or_insert_with(|| EmbeddingTable::new(vector.len()));
            table.insert(token, vector).map_err(|reason| malformed(line, reason))?;
        }
        let table = match table {
            Some(t) if !t.is_empty() => t,
            _ => return Err(CorpusError::Empty("embedding table")),
        };
        if let Some((count, _)) = declared {
            if count != table.len() {
                log::warn!(
                    "embedding header declares {count} vectors but the body has {}; using the body",
                    table.len()
                );
            }
        }
        Ok(table)
    }
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable, CorpusError> {
    EmbeddingTable::from_text(&read(path)?)
}

fn token_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// One stop-word per line, folded to lowercase.
pub fn parse_stoplist(text: &str) -> HashSet<String> {
    token_lines(text).map(|(_, l)| l.to_lowercase()).collect()
}

pub fn load_stoplist(path: &Path) -> Result<HashSet<String>, CorpusError> {
    Ok(parse_stoplist(&read(path)?))
}

/// `token<TAB>canonical` rows; keys folded to lowercase.
pub fn parse_synonym_map(text: &str) -> Result<HashMap<String, String>, CorpusError> {
    token_lines(text)
        .map(|(line, l)| {
            let fields: Vec<&str> = l.split('\t').map(str::trim).collect();
            match fields[..] {
                [from, to] if !from.is_empty() && !to.is_empty() => {
                    Ok((from.to_lowercase(), to.to_string()))
                }
                _ => Err(malformed(line, "expected token<TAB>canonical")),
            }
        })
        .collect()
}

pub fn load_synonym_map(path: &Path) -> Result<HashMap<String, String>, CorpusError> {
    parse_synonym_map(&read(path)?)
}

/// Drops tokens found (case-insensitively) in the stoplist. `None` when
/// nothing survives, so the caller can drop the item.
pub fn remove_stopwords(tokens: &[String], stoplist: &HashSet<String>) -> Option<Vec<String>> {
    let kept: Vec<String> = tokens
        .iter()
        .filter(|t| !stoplist.contains(&t.to_lowercase()))
        .cloned()
        .collect();
    (!kept.is_empty()).then_some(kept)
}

/// Replaces each token by its canonical form when the lexicon has one.
pub fn apply_synonym_map(tokens: &[String], lexicon: &HashMap<String, String>) -> Vec<String> {
    tokens
        .iter()
        .map(|t| lexicon.get(&t.to_lowercase()).unwrap_or(t).clone())
        .collect()
}

/// Loaded control resources. Synonym mapping runs before stop-word removal.
#[derive(Clone, Debug, Default)]
pub struct Controls {
    pub stoplist: Option<HashSet<String>>,
    pub synonyms: Option<HashMap<String, String>>,
    /// Sample definitions without the one-gloss-per-definiendum constraint.
    pub paraphrases: bool,
}

impl Controls {
    /// Transforms one entry; `None` when stop-word removal empties the gloss.
    /// Parse-tree leaves follow the synonym map; stop-word removal discards
    /// the tree, since the pruned gloss no longer matches it.
    pub fn apply(&self, entry: &DefinitionEntry) -> Option<DefinitionEntry> {
        let mut out = entry.clone();
        if let Some(lexicon) = &self.synonyms {
            out.gloss = apply_synonym_map(&out.gloss, lexicon);
            if let Some(tree) = &mut out.parse {
                tree.map_leaves(&mut |leaf| lexicon.get(&leaf.to_lowercase()).cloned());
            }
        }
        if let Some(stoplist) = &self.stoplist {
            out.gloss = remove_stopwords(&out.gloss, stoplist)?;
            out.parse = None;
        }
        Some(out)
    }
}

/// A human similarity judgment over two items.
#[derive(Clone, Debug, PartialEq)]
pub struct RatedPair {
    pub item_a: String,
    pub item_b: String,
    pub human_score: f64,
}

/// `item_a item_b score` rows separated by tabs or spaces.
pub fn parse_ratings(text: &str) -> Result<Vec<RatedPair>, CorpusError> {
    let pairs = token_lines(text)
        .map(|(line, l)| {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let [a, b, score] = fields[..] else {
                return Err(malformed(line, "expected item_a, item_b, score"));
            };
            let human_score: f64 = score
                .parse()
                .ok()
                .filter(|s: &f64| s.is_finite())
                .ok_or_else(|| malformed(line, format!("bad score {score:?}")))?;
            Ok(RatedPair {
                item_a: a.to_string(),
                item_b: b.to_string(),
                human_score,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if pairs.is_empty() {
        return Err(CorpusError::Empty("ratings file"));
    }
    Ok(pairs)
}

pub fn load_ratings(path: &Path) -> Result<Vec<RatedPair>, CorpusError> {
    parse_ratings(&read(path)?)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BenchmarkEval {
    /// Spearman correlation between vector distances and human scores.
    pub rho: f64,
    pub covered: usize,
    pub skipped: usize,
}

/// Distances should anti-correlate with similarity ratings, so a good space
/// yields `rho` close to −1.
pub fn eval_embedding_benchmark(
    table: &EmbeddingTable,
    pairs: &[RatedPair],
    metric: VectorMetric,
) -> Result<BenchmarkEval, CorpusError> {
    let mut distances = Vec::new();
    let mut scores = Vec::new();
    for pair in pairs {
        if let (Some(a), Some(b)) = (table.lookup(&pair.item_a), table.lookup(&pair.item_b)) {
            distances.push(metric.distance(a, b)?);
            scores.push(pair.human_score);
        }
    }
    let covered = distances.len();
    let skipped = pairs.len() - covered;
    if covered < 3 {
        return Err(CorpusError::TooFewCovered { covered, skipped });
    }
    Ok(BenchmarkEval {
        rho: spearman(&distances, &scores)?,
        covered,
        skipped,
    })
}

/// Entries paired with their definiendum's vector.
#[derive(Clone, Debug)]
pub struct MeaningAlignment {
    pub items: Vec<(DefinitionEntry, Vec<f64>)>,
    /// Entries whose definiendum has no vector.
    pub dropped: usize,
}

pub fn meaning_vectors_for_definitions(
    entries: &[DefinitionEntry],
    table: &EmbeddingTable,
) -> Result<MeaningAlignment, CorpusError> {
    let mut items = Vec::with_capacity(entries.len());
    let mut dropped = 0;
    for entry in entries {
        match table.lookup(&entry.definiendum) {
            Some(v) => items.push((entry.clone(), v.to_vec())),
            None => {
                log::debug!("no vector for {:?}; dropping its entry", entry.definiendum);
                dropped += 1;
            }
        }
    }
    if items.is_empty() {
        return Err(CorpusError::AllDropped);
    }
    if dropped > 0 {
        log::info!("dropped {dropped} entries with out-of-vocabulary keys");
    }
    Ok(MeaningAlignment { items, dropped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    const DEFS: &str = "pilot\ta steersman\n\
                        sneer\tthe act of sneering\t(NP (DT the) (NN act))\n\
                        cat\ta small domestic feline\n";

    #[test]
    fn definitions_load() {
        let entries = parse_definitions(DEFS, None).unwrap();
        assert_eq!(entries.len(), 3);
        assert_eq!(entries[1].gloss, toks("the act of sneering"));
        assert_eq!(entries[1].parse.as_ref().unwrap().size(), 5);
        assert!(entries[0].parse.is_none());

        let allow: HashSet<String> = ["pilot", "cat"].iter().map(|s| s.to_string()).collect();
        let kept = parse_definitions(DEFS, Some(&allow)).unwrap();
        assert_eq!(kept.len(), 2);
        assert!(kept.iter().all(|e| e.definiendum != "sneer"));
    }

    #[test]
    fn definition_errors_report_line() {
        let err = parse_definitions("pilot\ta steersman\ncat\t  \n", None).unwrap_err();
        assert!(matches!(err, CorpusError::Malformed { line: 2, .. }), "{err}");
        assert!(matches!(
            parse_definitions("only-one-field\n", None),
            Err(CorpusError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_definitions("a\tgloss\t(NP (DT the)\n", None),
            Err(CorpusError::Malformed { line: 1, .. })
        ));
        assert!(matches!(parse_definitions("\n\n", None), Err(CorpusError::Empty(_))));
    }

    fn entry(word: &str, gloss: &str) -> DefinitionEntry {
        DefinitionEntry {
            definiendum: word.into(),
            gloss: toks(gloss),
            parse: None,
        }
    }

    #[test]
    fn sampling() {
        let entries = vec![entry("w", "g one"), entry("w", "g two"), entry("v", "g three")];
        let all = sample_definitions(&entries, 3, false, 1).unwrap();
        assert_eq!(all, entries);

        for seed in 0..20 {
            let two = sample_definitions(&entries, 2, true, seed).unwrap();
            assert_eq!(two.len(), 2);
            assert_eq!(two.iter().filter(|e| e.definiendum == "w").count(), 1);
            assert_eq!(two.iter().filter(|e| e.definiendum == "v").count(), 1);
        }
        assert!(matches!(
            sample_definitions(&entries, 3, true, 0),
            Err(CorpusError::Insufficient {
                requested: 3,
                available: 2
            })
        ));
        assert_eq!(
            sample_definitions(&entries, 2, false, 9).unwrap(),
            sample_definitions(&entries, 2, false, 9).unwrap()
        );
    }

    #[test]
    fn both_glosses_get_picked_eventually() {
        let entries = vec![entry("w", "g one"), entry("w", "g two"), entry("v", "g three")];
        let picked: HashSet<Vec<String>> = (0..50)
            .map(|seed| {
                sample_definitions(&entries, 2, true, seed).unwrap()[0]
                    .gloss
                    .clone()
            })
            .collect();
        assert_eq!(picked.len(), 2);
    }

    #[test]
    fn embeddings_parse() {
        let t = EmbeddingTable::from_text("2 3\ncat 1 0 0\ndog 0.5 0.5 0\n").unwrap();
        assert_eq!(t.dimension(), 3);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("dog"), Some(&[0.5, 0.5, 0.0][..]));

        let headerless = EmbeddingTable::from_text("cat 1 0\ndog 0 1\n").unwrap();
        assert_eq!(headerless.dimension(), 2);

        assert!(matches!(
            EmbeddingTable::from_text("2 3\ncat 1 0\n"),
            Err(CorpusError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            EmbeddingTable::from_text("cat 1 x\n"),
            Err(CorpusError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            EmbeddingTable::from_text("cat 1 0\ncat 0 1\n"),
            Err(CorpusError::Malformed { line: 2, .. })
        ));
        // header count disagrees: body wins
        assert_eq!(EmbeddingTable::from_text("5 2\na 1 0\nb 0 1\n").unwrap().len(), 2);
        assert!(matches!(EmbeddingTable::from_text("3 2\n"), Err(CorpusError::Empty(_))));
    }

    #[test]
    fn stopwords() {
        let stop: HashSet<String> = ["the", "of"].iter().map(|s| s.to_string()).collect();
        assert_eq!(
            remove_stopwords(&toks("The act of sneering"), &stop),
            Some(toks("act sneering"))
        );
        assert_eq!(remove_stopwords(&toks("act sneering"), &stop), Some(toks("act sneering")));
        assert_eq!(remove_stopwords(&toks("the of"), &stop), None);
        assert_eq!(parse_stoplist("The\n\nof\n"), stop);
    }

    #[test]
    fn synonyms() {
        let map = parse_synonym_map("steersman\tpilot\n").unwrap();
        assert_eq!(apply_synonym_map(&toks("a steersman"), &map), toks("a pilot"));
        assert_eq!(apply_synonym_map(&toks("a steersman"), &HashMap::new()), toks("a steersman"));
        let once = apply_synonym_map(&toks("a Steersman pilot"), &map);
        assert_eq!(once, toks("a pilot pilot"));
        assert_eq!(apply_synonym_map(&once, &map), once);
        assert!(parse_synonym_map("lonely\n").is_err());
    }

    #[test]
    fn controls_run_synonyms_then_stopwords() {
        let controls = Controls {
            stoplist: Some(parse_stoplist("a\npilot\n")),
            synonyms: Some(parse_synonym_map("steersman\tpilot\n").unwrap()),
            paraphrases: false,
        };
        // the synonym rewrite creates a stop-word, which is then removed
        assert_eq!(controls.apply(&entry("pilot", "a steersman")), None);
        let kept = controls.apply(&entry("cat", "a small steersman cat")).unwrap();
        assert_eq!(kept.gloss, toks("small cat"));

        let tree_entry = DefinitionEntry {
            parse: Some(parse_bracketed("(NP (DT a) (NN steersman))").unwrap()),
            ..entry("pilot", "a steersman")
        };
        let only_syn = Controls {
            synonyms: controls.synonyms.clone(),
            ..Controls::default()
        };
        let mapped = only_syn.apply(&tree_entry).unwrap();
        assert_eq!(mapped.parse.unwrap().to_string(), "(NP (DT a) (NN pilot))");
    }

    #[test]
    fn ratings_and_benchmark() {
        let table = EmbeddingTable::from_text("a 1 0\nb 1 0.1\nc 1 1\nd 0 1\n").unwrap();
        // cosine distances: ab < ac < ad; scores decrease accordingly
        let ratings = parse_ratings("a b 9\na\tc\t5\na d 1\nb zz 3\n").unwrap();
        let eval = eval_embedding_benchmark(&table, &ratings, VectorMetric::Cosine).unwrap();
        assert_eq!(eval.rho, -1.0);
        assert_eq!((eval.covered, eval.skipped), (3, 1));

        let sparse = parse_ratings("a b 1\nx y 2\n").unwrap();
        assert!(matches!(
            eval_embedding_benchmark(&table, &sparse, VectorMetric::Euclidean),
            Err(CorpusError::TooFewCovered { covered: 1, skipped: 1 })
        ));
        assert!(parse_ratings("a b\n").is_err());
        assert!(parse_ratings("a b NaN\n").is_err());
    }

    #[test]
    fn meaning_alignment() {
        let table = EmbeddingTable::from_text("pilot 1 0\ncat 0 1\n").unwrap();
        let entries = vec![entry("pilot", "a steersman"), entry("Cat", "a feline")];
        let all = meaning_vectors_for_definitions(&entries, &table).unwrap();
        assert_eq!((all.items.len(), all.dropped), (2, 0));

        let with_oov = vec![entry("pilot", "x"), entry("zebra", "y"), entry("cat", "z")];
        let some = meaning_vectors_for_definitions(&with_oov, &table).unwrap();
        assert_eq!((some.items.len(), some.dropped), (2, 1));

        let empty = EmbeddingTable::new(2);
        assert!(matches!(
            meaning_vectors_for_definitions(&entries, &empty),
            Err(CorpusError::AllDropped)
        ));
    }
}
