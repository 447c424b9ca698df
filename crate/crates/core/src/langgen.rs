//! Artificial languages: meaning-message pairs generated under controlled
//! holism (`h`), synonymy (`s`), ungrounded symbols (`u`) and paraphrase
//! (`p`), plus random baselines.
//!
//! A meaning is a binary vector over `K` concepts. The values of the first
//! `h` concepts are expressed jointly by one holistic symbol, every other
//! concept value by its own symbol. Each expression has `s` interchangeable
//! synonyms, `u` meaningless symbols are inserted at random positions into
//! every message, and `p` candidate messages are drawn per meaning before
//! duplicate pairs are dropped.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::seed::{rng_from_seed, Rng};

pub const DEFAULT_CONCEPTS: usize = 5;
pub const MAX_CONCEPTS: usize = 16;

/// Alphabet size for random baselines.
pub const BASELINE_ALPHABET: u32 = 26;
pub const BASELINE_FIXED_LENGTH: usize = 5;
pub const BASELINE_MAX_LENGTH: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LangError {
    #[error("concept count {0} outside 1..={MAX_CONCEPTS}")]
    ConceptCount(usize),
    #[error("holistic width {holistic} outside 1..={concepts}")]
    HolisticWidth { holistic: usize, concepts: usize },
    #[error("synonyms per expression must be at least 1")]
    Synonyms,
    #[error("messages per meaning must be at least 1")]
    Paraphrases,
    #[error("meaning vector must be a non-empty sequence of 0/1 values")]
    InvalidMeaning,
    #[error("message must contain at least one symbol")]
    EmptyMessage,
    #[error("invalid symbol {0:?}")]
    InvalidSymbol(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A point in meaning space: one binary value per concept.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct MeaningVector(Vec<u8>);

impl MeaningVector {
    pub fn new(bits: Vec<u8>) -> Result<Self, LangError> {
        if bits.is_empty() || bits.iter().any(|&b| b > 1) {
            return Err(LangError::InvalidMeaning);
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Reads `bits[start..start + width]` as a big-endian binary number.
    fn combination_index(&self, start: usize, width: usize) -> usize {
        self.0[start..start + width]
            .iter()
            .fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl<'de> Deserialize<'de> for MeaningVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(deserializer)?;
        MeaningVector::new(bits).map_err(serde::de::Error::custom)
    }
}

/// Opaque symbol identifier, rendered as `s00`, `s01`, ...
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u32);

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{:02}", self.0)
    }
}

impl FromStr for Symbol {
    type Err = LangError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('s')
            .filter(|digits| !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|digits| digits.parse().ok())
            .map(Symbol)
            .ok_or_else(|| LangError::InvalidSymbol(s.to_string()))
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// A form: a non-empty sequence of symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Message(Vec<Symbol>);

impl Message {
    pub fn new(tokens: Vec<Symbol>) -> Result<Self, LangError> {
        if tokens.is_empty() {
            return Err(LangError::EmptyMessage);
        }
        Ok(Self(tokens))
    }

    pub fn tokens(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<'de> Deserialize<'de> for Message {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let tokens = Vec::<Symbol>::deserialize(deserializer)?;
        Message::new(tokens).map_err(serde::de::Error::custom)
    }
}

/// Arrangement of the grounded expressions inside a message. Ungrounded
/// symbols are always inserted afterwards at fresh random positions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundedOrder {
    /// Holistic expression first, then the remaining concepts in index order.
    Fixed,
    /// One random order per meaning, shared by all of its paraphrases.
    #[default]
    PerMeaning,
    /// A fresh random order for every message.
    PerMessage,
}

/// Generation parameters for one artificial language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LanguageSpec {
    pub concepts: usize,
    /// Number of leading concepts fused into one holistic expression.
    pub holistic: usize,
    pub synonyms: usize,
    pub ungrounded: usize,
    pub paraphrases: usize,
    #[serde(default)]
    pub order: GroundedOrder,
    pub seed: u64,
}

impl Default for LanguageSpec {
    fn default() -> Self {
        Self {
            concepts: DEFAULT_CONCEPTS,
            holistic: 1,
            synonyms: 1,
            ungrounded: 0,
            paraphrases: 1,
            order: GroundedOrder::default(),
            seed: 0,
        }
    }
}

impl LanguageSpec {
    pub fn new(holistic: usize, synonyms: usize, ungrounded: usize, paraphrases: usize) -> Self {
        Self {
            holistic,
            synonyms,
            ungrounded,
            paraphrases,
            ..Self::default()
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_order(self, order: GroundedOrder) -> Self {
        Self { order, ..self }
    }

    pub fn validate(&self) -> Result<(), LangError> {
        check_concepts(self.concepts)?;
        if self.holistic == 0 || self.holistic > self.concepts {
            return Err(LangError::HolisticWidth {
                holistic: self.holistic,
                concepts: self.concepts,
            });
        }
        if self.synonyms == 0 {
            return Err(LangError::Synonyms);
        }
        if self.paraphrases == 0 {
            return Err(LangError::Paraphrases);
        }
        Ok(())
    }

    /// Grounded symbols plus ungrounded ones: `2^h·s + (K−h)·2·s + u`.
    pub fn inventory_size(&self) -> usize {
        (1 << self.holistic) * self.synonyms
            + (self.concepts - self.holistic) * 2 * self.synonyms
            + self.ungrounded
    }

    /// Token count of every message this spec generates.
    pub fn message_length(&self) -> usize {
        self.concepts - self.holistic + 1 + self.ungrounded
    }
}

fn check_concepts(concepts: usize) -> Result<(), LangError> {
    if concepts == 0 || concepts > MAX_CONCEPTS {
        return Err(LangError::ConceptCount(concepts));
    }
    Ok(())
}

/// All `2^K` meanings in lexicographic order.
pub fn enumerate_meanings(concepts: usize) -> Result<Vec<MeaningVector>, LangError> {
    check_concepts(concepts)?;
    Ok((0..1usize << concepts)
        .map(|code| {
            MeaningVector(
                (0..concepts)
                    .map(|bit| ((code >> (concepts - 1 - bit)) & 1) as u8)
                    .collect(),
            )
        })
        .collect())
}

/// Symbol tables of a grid-generated language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lexicon {
    concepts: usize,
    holistic_width: usize,
    /// Indexed by the big-endian code of the first `h` concept values.
    holistic: Vec<Vec<Symbol>>,
    /// `atomic[c][v]` holds the synonyms for value `v` of concept `h + c`.
    atomic: Vec<[Vec<Symbol>; 2]>,
    ungrounded: Vec<Symbol>,
}

impl Lexicon {
    pub fn holistic_table(&self) -> &[Vec<Symbol>] {
        &self.holistic
    }

    pub fn atomic_table(&self) -> &[[Vec<Symbol>; 2]] {
        &self.atomic
    }

    pub fn ungrounded(&self) -> &[Symbol] {
        &self.ungrounded
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.holistic
            .iter()
            .flatten()
            .chain(self.atomic.iter().flat_map(|pair| pair.iter().flatten()))
            .chain(self.ungrounded.iter())
            .copied()
    }

    /// Maps a message back to its meaning, ignoring ungrounded symbols and
    /// the order of grounded ones. Returns `None` unless the holistic slot
    /// and every atomic concept are expressed exactly once.
    pub fn decode(&self, message: &Message) -> Option<MeaningVector> {
        let atomic_count = self.concepts - self.holistic_width;
        let mut code = None;
        let mut values: Vec<Option<u8>> = vec![None; atomic_count];
        for sym in message.tokens() {
            if self.ungrounded.contains(sym) {
                continue;
            }
            if let Some(c) = self.holistic.iter().position(|syn| syn.contains(sym)) {
                if code.replace(c).is_some() {
                    return None;
                }
                continue;
            }
            let (concept, value) = self.atomic.iter().enumerate().find_map(|(i, pair)| {
                pair.iter().position(|syn| syn.contains(sym)).map(|v| (i, v as u8))
            })?;
            if values[concept].replace(value).is_some() {
                return None;
            }
        }
        let code = code?;
        let mut bits: Vec<u8> = (0..self.holistic_width)
            .map(|bit| ((code >> (self.holistic_width - 1 - bit)) & 1) as u8)
            .collect();
        for value in values {
            bits.push(value?);
        }
        Some(MeaningVector(bits))
    }
}

/// Allocates a fresh, globally distinct symbol for every table slot.
pub fn build_lexicon(spec: &LanguageSpec, rng: &mut Rng) -> Result<Lexicon, LangError> {
    spec.validate()?;
    let mut ids: Vec<u32> = (0..spec.inventory_size() as u32).collect();
    ids.shuffle(rng);
    let mut pool = ids.into_iter().map(Symbol);
    let mut take = |count: usize| -> Vec<Symbol> { pool.by_ref().take(count).collect() };

    let holistic = (0..1usize << spec.holistic)
        .map(|_| take(spec.synonyms))
        .collect();
    let atomic = (spec.holistic..spec.concepts)
        .map(|_| [take(spec.synonyms), take(spec.synonyms)])
        .collect();
    let ungrounded = take(spec.ungrounded);
    Ok(Lexicon {
        concepts: spec.concepts,
        holistic_width: spec.holistic,
        holistic,
        atomic,
        ungrounded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineKind {
    /// Every message has exactly five symbols.
    FixedLength,
    /// Message lengths uniform on `1..=10`.
    VariableLength,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 2] = [BaselineKind::FixedLength, BaselineKind::VariableLength];

    pub fn name(&self) -> &'static str {
        match self {
            BaselineKind::FixedLength => "baseline-fixed",
            BaselineKind::VariableLength => "baseline-variable",
        }
    }
}

/// Where a language came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LanguageOrigin {
    Grid(LanguageSpec),
    Baseline {
        baseline: BaselineKind,
        concepts: usize,
        seed: u64,
    },
    Imported,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Language {
    pub pairs: Vec<(MeaningVector, Message)>,
    pub origin: LanguageOrigin,
}

#[derive(Serialize, Deserialize)]
struct PairLine {
    meaning: MeaningVector,
    message: Message,
}

impl Language {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn meanings(&self) -> impl Iterator<Item = &MeaningVector> {
        self.pairs.iter().map(|(m, _)| m)
    }

    pub fn messages(&self) -> impl Iterator<Item = &Message> {
        self.pairs.iter().map(|(_, msg)| msg)
    }

    /// One `{"meaning":[..],"message":[..]}` object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for (meaning, message) in &self.pairs {
            let line = serde_json::to_string(&PairLine {
                meaning: meaning.clone(),
                message: message.clone(),
            })
            .expect("pair serialization is infallible");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, LangError> {
        let mut pairs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parsed: PairLine = serde_json::from_str(line).map_err(|e| LangError::Parse {
                line: idx + 1,
                reason: e.to_string(),
            })?;
            pairs.push((parsed.meaning, parsed.message));
        }
        Ok(Language {
            pairs,
            origin: LanguageOrigin::Imported,
        })
    }
}

/// Generates a grid language; fully determined by `spec` (seed included).
pub fn generate_language(spec: &LanguageSpec) -> Result<Language, LangError> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let lexicon = build_lexicon(spec, &mut rng)?;
    let meanings = enumerate_meanings(spec.concepts)?;

    let mut seen = HashSet::new();
    let mut pairs = Vec::with_capacity(meanings.len() * spec.paraphrases);
    for meaning in meanings {
        let code = meaning.combination_index(0, spec.holistic);
        let slots = spec.concepts - spec.holistic + 1;
        let mut arrangement: Vec<usize> = (0..slots).collect();
        if spec.order == GroundedOrder::PerMeaning {
            arrangement.shuffle(&mut rng);
        }
        for _ in 0..spec.paraphrases {
            let mut grounded = Vec::with_capacity(slots);
            grounded.push(pick(&lexicon.holistic[code], &mut rng));
            for (offset, values) in lexicon.atomic.iter().enumerate() {
                let value = meaning.bits()[spec.holistic + offset] as usize;
                grounded.push(pick(&values[value], &mut rng));
            }
            if spec.order == GroundedOrder::PerMessage {
                arrangement.shuffle(&mut rng);
            }
            let mut tokens = Vec::with_capacity(spec.message_length());
            tokens.extend(arrangement.iter().map(|&slot| grounded[slot]));
            for &sym in &lexicon.ungrounded {
                let at = rng.random_range(0..=tokens.len());
                tokens.insert(at, sym);
            }
            let message = Message(tokens);
            if seen.insert((meaning.clone(), message.clone())) {
                pairs.push((meaning.clone(), message));
            }
        }
    }
    Ok(Language {
        pairs,
        origin: LanguageOrigin::Grid(*spec),
    })
}

fn pick(synonyms: &[Symbol], rng: &mut Rng) -> Symbol {
    *synonyms.choose(rng).expect("synonym sets are never empty")
}

/// Assigns every meaning a random message over a 26-symbol alphabet.
pub fn generate_random_baseline(
    kind: BaselineKind,
    concepts: usize,
    seed: u64,
) -> Result<Language, LangError> {
    let meanings = enumerate_meanings(concepts)?;
    let mut rng = rng_from_seed(seed);
    let pairs = meanings
        .into_iter()
        .map(|meaning| {
            let len = match kind {
                BaselineKind::FixedLength => BASELINE_FIXED_LENGTH,
                BaselineKind::VariableLength => rng.random_range(1..=BASELINE_MAX_LENGTH),
            };
            let tokens = (0..len)
                .map(|_| Symbol(rng.random_range(0..BASELINE_ALPHABET)))
                .collect();
            (meaning, Message(tokens))
        })
        .collect();
    Ok(Language {
        pairs,
        origin: LanguageOrigin::Baseline {
            baseline: kind,
            concepts,
            seed,
        },
    })
}
