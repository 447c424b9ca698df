//! Meaning-form correlation (MFC) toolkit.
//!
//! MFC measures how well pairwise distances between meanings line up with
//! pairwise distances between the forms that express them. The crate covers
//! the whole pipeline:
//!
//! * [`langgen`] builds artificial languages with tunable holism, synonymy,
//!   ungrounded symbols and paraphrase, plus random baselines;
//! * [`metrics`] provides the distances (Hamming, Levenshtein, tree edit
//!   distance, cosine, Euclidean) and condensed distance matrices;
//! * [`stats`] holds Pearson/Spearman correlation, the Mantel permutation
//!   test and a dummy-coded least-squares fit;
//! * [`corpus`] ingests definitions, sentences, embedding tables and rating
//!   benchmarks and applies the stop-word / synonym controls;
//! * [`experiments`] wires these into sweeps, factor models and diagnostics.

pub mod corpus;
pub mod experiments;
pub mod langgen;
pub mod metrics;
pub mod seed;
pub mod stats;

pub use langgen::{GroundedOrder, Language, LanguageSpec, MeaningVector, Message, Symbol};
pub use metrics::{DistanceMatrix, ParseTree};
pub use stats::{MantelConfig, MantelResult, OlsFit};
