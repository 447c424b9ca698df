use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricError;

/// Position of pair `(i, j)`, `i < j`, in row-major condensed storage.
#[inline]
pub fn condensed_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Symmetric, zero-diagonal distance matrix stored as its upper triangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_condensed(n: usize, values: Vec<f64>) -> Result<Self, MetricError> {
        let expected = n * n.saturating_sub(1) / 2;
        if values.len() != expected {
            return Err(MetricError::CondensedLength {
                n,
                expected,
                got: values.len(),
            });
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(MetricError::InvalidDistance(bad));
        }
        Ok(Self { n, values })
    }

    /// Builds from a full square matrix, reading the upper triangle.
    pub fn from_square(rows: &[Vec<f64>]) -> Result<Self, MetricError> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::LengthMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            values.extend_from_slice(&row[i + 1..]);
        }
        Self::from_condensed(n, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.values[condensed_index(self.n, i, j)],
            std::cmp::Ordering::Greater => self.values[condensed_index(self.n, j, i)],
        }
    }

    /// `(i, j)` pairs in condensed order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    /// Matrix whose item `k` is item `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> DistanceMatrix {
        assert_eq!(perm.len(), self.n, "permutation length");
        let values = self.pairs().map(|(i, j)| self.get(perm[i], perm[j])).collect();
        DistanceMatrix { n: self.n, values }
    }

    pub fn to_square(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// `n,<n>` header line, then one condensed value per line.
    pub fn to_condensed_csv(&self) -> String {
        let mut out = format!("n,{}\n", self.n);
        for v in &self.values {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    pub fn to_square_csv(&self) -> String {
        let mut out = String::new();
        for row in self.to_square() {
            let cells: Vec<String> = row.iter().map(f64::to_string).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Reads either export layout; a leading `n,` line selects condensed.
    pub fn from_csv(text: &str) -> Result<Self, MetricError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let Some((first_idx, first)) = lines.next() else {
            return Err(MetricError::Csv {
                line: 1,
                reason: "empty matrix file".into(),
            });
        };
        let parse = |line: usize, cell: &str| -> Result<f64, MetricError> {
            cell.trim().parse().map_err(|_| MetricError::Csv {
                line: line + 1,
                reason: format!("not a number: {cell:?}"),
            })
        };
        if let Some(count) = first.trim().strip_prefix("n,") {
            let n = count.trim().parse().map_err(|_| MetricError::Csv {
                line: first_idx + 1,
                reason: format!("bad item count {count:?}"),
            })?;
            let values = lines
                .map(|(idx, l)| parse(idx, l))
                .collect::<Result<Vec<_>, _>>()?;
            return Self::from_condensed(n, values);
        }
        let rows = std::iter::once((first_idx, first))
            .chain(lines)
            .map(|(idx, l)| l.split(',').map(|c| parse(idx, c)).collect())
            .collect::<Result<Vec<Vec<f64>>, _>>()?;
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                let mirrored = rows.get(j).and_then(|r| r.get(i)).copied();
                if (i == j && v != 0.0) || mirrored != Some(v) {
                    return Err(MetricError::Csv {
                        line: i + 1,
                        reason: "square matrix must be symmetric with a zero diagonal".into(),
                    });
                }
            }
        }
        Self::from_square(&rows)
    }
}

/// All `n(n−1)/2` distances among `items`, computed row-parallel. The result
/// does not depend on how rows are split across workers.
pub fn pairwise_matrix<T, F>(items: &[T], metric: F) -> Result<DistanceMatrix, MetricError>
where
    T: Sync,
    F: Fn(&T, &T) -> Result<f64, MetricError> + Sync,
{
    let n = items.len();
    if n < 3 {
        return Err(MetricError::TooFewItems { min: 3, got: n });
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| {
                    let d = metric(&items[i], &items[j]).map_err(|e| MetricError::Pair {
                        i,
                        j,
                        source: Box::new(e),
                    })?;
                    if !d.is_finite() || d < 0.0 {
                        return Err(MetricError::Pair {
                            i,
                            j,
                            source: Box::new(MetricError::InvalidDistance(d)),
                        });
                    }
                    Ok(d)
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(DistanceMatrix {
        n,
        values: rows.concat(),
    })
}
