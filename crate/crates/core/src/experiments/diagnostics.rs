use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::metrics::DistanceMatrix;
use crate::stats::{average_ranks, StatsError};

/// An item pair whose meaning-distance rank and form-distance rank disagree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedPair {
    pub index_a: usize,
    pub index_b: usize,
    pub meaning_rank: f64,
    pub form_rank: f64,
    pub rank_gap: f64,
}

/// The `k` pairs with the largest rank gap, largest first; ties go to the
/// lexicographically smaller `(index_a, index_b)`.
pub fn problematic_pairs(
    meaning: &DistanceMatrix,
    form: &DistanceMatrix,
    k: usize,
) -> Result<Vec<RankedPair>, ExperimentError> {
    if meaning.n() != form.n() {
        return Err(StatsError::SizeMismatch {
            left: meaning.n(),
            right: form.n(),
        }
        .into());
    }
    let total = meaning.values().len();
    if k > total {
        return Err(ExperimentError::Config(format!(
            "k = {k} exceeds the {total} available pairs"
        )));
    }
    let meaning_ranks = average_ranks(meaning.values());
    let form_ranks = average_ranks(form.values());
    let mut pairs: Vec<RankedPair> = meaning
        .pairs()
        .zip(meaning_ranks.into_iter().zip(form_ranks))
        .map(|((index_a, index_b), (meaning_rank, form_rank))| RankedPair {
            index_a,
            index_b,
            meaning_rank,
            form_rank,
            rank_gap: (meaning_rank - form_rank).abs(),
        })
        .collect();
    // condensed order is already (index_a, index_b) ascending; a stable sort keeps it for ties
    pairs.sort_by(|x, y| y.rank_gap.total_cmp(&x.rank_gap));
    pairs.truncate(k);
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::pairwise_matrix;

    fn line(points: &[f64]) -> DistanceMatrix {
        pairwise_matrix(points, |a, b| Ok((a - b).abs())).unwrap()
    }

    #[test]
    fn identical_matrices_have_no_gap() {
        let dm = line(&[0.0, 1.0, 3.0, 7.0]);
        let pairs = problematic_pairs(&dm, &dm, 6).unwrap();
        assert_eq!(pairs.len(), 6);
        assert!(pairs.iter().all(|p| p.rank_gap == 0.0));
        // all tied, so condensed order survives
        assert_eq!((pairs[0].index_a, pairs[0].index_b), (0, 1));
        assert_eq!((pairs[5].index_a, pairs[5].index_b), (2, 3));
    }

    #[test]
    fn reversed_order_puts_extremes_first() {
        // ten distinct distances for n = 5, ranked 1..10 in condensed order
        let meaning = DistanceMatrix::from_condensed(5, (1..=10).map(f64::from).collect()).unwrap();
        let form = DistanceMatrix::from_condensed(5, (1..=10).rev().map(f64::from).collect()).unwrap();
        let pairs = problematic_pairs(&meaning, &form, 10).unwrap();
        // brute force: gap at condensed slot c is |(c+1) - (10-c)| = |2c - 9|
        let mut expected: Vec<(f64, usize)> = (0..10).map(|c| (((2 * c) as f64 - 9.0).abs(), c)).collect();
        expected.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let slots: Vec<(usize, usize)> = meaning.pairs().collect();
        for (got, (gap, slot)) in pairs.iter().zip(expected) {
            assert_eq!(got.rank_gap, gap);
            assert_eq!((got.index_a, got.index_b), slots[slot]);
        }
        assert_eq!(pairs[0].rank_gap, 9.0);
        assert_eq!((pairs[0].index_a, pairs[0].index_b), (0, 1));
        assert_eq!((pairs[1].index_a, pairs[1].index_b), (3, 4));
    }

    #[test]
    fn planted_outlier_ranks_first() {
        let meaning = line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let mut form_values = meaning.values().to_vec();
        // items 2 and 3 are close in meaning but get the largest form distance
        let slot = crate::metrics::condensed_index(6, 2, 3);
        form_values[slot] = 100.0;
        let form = DistanceMatrix::from_condensed(6, form_values).unwrap();
        let top = &problematic_pairs(&meaning, &form, 3).unwrap()[0];
        assert_eq!((top.index_a, top.index_b), (2, 3));
    }

    #[test]
    fn argument_errors() {
        let a = line(&[0.0, 1.0, 2.0]);
        let b = line(&[0.0, 1.0, 2.0, 3.0]);
        assert!(matches!(problematic_pairs(&a, &b, 1), Err(ExperimentError::Stats(_))));
        assert!(matches!(problematic_pairs(&a, &a, 4), Err(ExperimentError::Config(_))));
    }
}
