//! Mantel test: correlation between two distance matrices, with significance
//! from jointly permuting the rows and columns of one of them.
//!
//! Permutation `k` draws its shuffle from a generator seeded with
//! `derive_seed([seed, k])`, so the null distribution is identical whatever
//! the number of worker threads.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correlation::{average_ranks, centered, CorrelationMethod};
use super::StatsError;
use crate::metrics::DistanceMatrix;
use crate::seed::{derive_seed, rng_from_seed};

/// Absolute slack when counting permuted correlations at least as extreme as
/// the observed one; both are computed with different summation orders.
const TIE_EPSILON: f64 = 1e-10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    #[default]
    Greater,
    TwoSided,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MantelConfig {
    pub method: CorrelationMethod,
    pub permutations: usize,
    pub alternative: Alternative,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for MantelConfig {
    fn default() -> Self {
        Self {
            method: CorrelationMethod::Pearson,
            permutations: 9999,
            alternative: Alternative::Greater,
            alpha: 0.05,
            seed: 0,
        }
    }
}

impl MantelConfig {
    pub fn validate(&self) -> Result<(), StatsError> {
        if self.permutations < 99 {
            return Err(StatsError::Config(format!(
                "at least 99 permutations required, got {}",
                self.permutations
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(StatsError::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MantelResult {
    pub r: f64,
    pub p_value: f64,
    pub z_score: f64,
    #[serde(rename = "n_permutations")]
    pub permutations: usize,
    /// Items per matrix.
    pub n: usize,
}

impl MantelResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

pub fn mantel(
    a: &DistanceMatrix,
    b: &DistanceMatrix,
    cfg: &MantelConfig,
) -> Result<MantelResult, StatsError> {
    cfg.validate()?;
    let n = a.n();
    if n != b.n() {
        return Err(StatsError::SizeMismatch { left: n, right: b.n() });
    }
    if n < 3 {
        return Err(StatsError::TooShort { min: 3, got: n });
    }
    let (xs, ys) = match cfg.method {
        CorrelationMethod::Pearson => (a.values().to_vec(), b.values().to_vec()),
        // ranks of a permuted matrix are the permuted ranks
        CorrelationMethod::Spearman => (average_ranks(a.values()), average_ranks(b.values())),
    };
    let (cx, sxx) = centered(&xs);
    let (cy, syy) = centered(&ys);
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let denom = (sxx * syy).sqrt();
    let observed = (cx.iter().zip(&cy).map(|(p, q)| p * q).sum::<f64>() / denom).clamp(-1.0, 1.0);

    let square = square_from_condensed(n, &cy);
    let null: Vec<f64> = (0..cfg.permutations)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |perm, k| {
                perm.clear();
                perm.extend(0..n);
                perm.shuffle(&mut rng_from_seed(derive_seed(&[cfg.seed, k as u64])));
                permuted_cross(&cx, &square, perm, n) / denom
            },
        )
        .collect();

    let count = null.len() as f64;
    let null_mean = null.iter().sum::<f64>() / count;
    let var = null.iter().map(|r| (r - null_mean).powi(2)).sum::<f64>() / (count - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0 && sd.is_finite()) {
        return Err(StatsError::DegeneratePermutations);
    }
    let extreme = match cfg.alternative {
        Alternative::Greater => null.iter().filter(|&&r| r >= observed - TIE_EPSILON).count(),
        Alternative::TwoSided => null
            .iter()
            .filter(|&&r| r.abs() >= observed.abs() - TIE_EPSILON)
            .count(),
    };
    Ok(MantelResult {
        r: observed,
        p_value: (1 + extreme) as f64 / (1 + cfg.permutations) as f64,
        z_score: (observed - null_mean) / sd,
        permutations: cfg.permutations,
        n,
    })
}

fn square_from_condensed(n: usize, condensed: &[f64]) -> Vec<f64> {
    let mut square = vec![0.0; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            square[i * n + j] = condensed[k];
            square[j * n + i] = condensed[k];
            k += 1;
        }
    }
    square
}

/// `Σ_{i<j} x[(i,j)] · y[(perm i, perm j)]` with `y` given as a square matrix.
fn permuted_cross(x: &[f64], square: &[f64], perm: &[usize], n: usize) -> f64 {
    let mut acc = 0.0;
    let mut k = 0;
    for i in 0..n {
        let row = &square[perm[i] * n..(perm[i] + 1) * n];
        let tail = &perm[i + 1..];
        let xs = &x[k..k + tail.len()];
        acc += xs.iter().zip(tail).map(|(v, &pj)| v * row[pj]).sum::<f64>();
        k += tail.len();
    }
    acc
}
