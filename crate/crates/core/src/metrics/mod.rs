//! Distances over meanings, token sequences, parse trees and vectors, and the
//! condensed pairwise matrices the Mantel test consumes.

mod edit;
mod matrix;
mod ted;
mod tree;
mod vector;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use edit::{hamming, levenshtein, levenshtein_normalized};
pub use matrix::{condensed_index, pairwise_matrix, DistanceMatrix};
pub use ted::{ted, ted_normalized};
pub use tree::{parse_bracketed, parse_tree_lines, ParseTree};
pub use vector::{cosine_distance, euclidean_distance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("zero-norm vector has no direction")]
    ZeroNorm,
    #[error("need at least {min} items, got {got}")]
    TooFewItems { min: usize, got: usize },
    #[error("distance between items {i} and {j}: {source}")]
    Pair {
        i: usize,
        j: usize,
        #[source]
        source: Box<MetricError>,
    },
    #[error("distance must be finite and non-negative, got {0}")]
    InvalidDistance(f64),
    #[error("condensed matrix for n={n} needs {expected} values, got {got}")]
    CondensedLength { n: usize, expected: usize, got: usize },
    #[error("tree parse error at byte {offset}: {reason}")]
    TreeParse { offset: usize, reason: String },
    #[error("matrix csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
}

/// Distance over embedding vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VectorMetric {
    Cosine,
    Euclidean,
}

impl VectorMetric {
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64, MetricError> {
        match self {
            VectorMetric::Cosine => cosine_distance(a, b),
            VectorMetric::Euclidean => euclidean_distance(a, b),
        }
    }
}

/// Distance over textual forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormMetric {
    Levenshtein,
    LevenshteinNorm,
    Ted,
    TedNorm,
}

impl FormMetric {
    pub fn needs_trees(&self) -> bool {
        matches!(self, FormMetric::Ted | FormMetric::TedNorm)
    }
}
