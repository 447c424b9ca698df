use super::MetricError;
use crate::langgen::MeaningVector;

/// Number of concepts on which two meanings differ.
pub fn hamming(a: &MeaningVector, b: &MeaningVector) -> Result<usize, MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.bits().iter().zip(b.bits()).filter(|(x, y)| x != y).count())
}

/// Unit-cost edit distance over token sequences (two-row dynamic program).
pub fn levenshtein<T: PartialEq>(x: &[T], y: &[T]) -> usize {
    // keep the shorter sequence along the row
    let (long, short) = if x.len() >= y.len() { (x, y) } else { (y, x) };
    if short.is_empty() {
        return long.len();
    }
    let mut prev: Vec<usize> = (0..=short.len()).collect();
    let mut curr = vec![0; short.len() + 1];
    for (i, a) in long.iter().enumerate() {
        curr[0] = i + 1;
        for (j, b) in short.iter().enumerate() {
            let substitution = prev[j] + usize::from(a != b);
            curr[j + 1] = substitution.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[short.len()]
}

/// Levenshtein distance divided by the longer length; 0 for two empty inputs.
pub fn levenshtein_normalized<T: PartialEq>(x: &[T], y: &[T]) -> f64 {
    let longest = x.len().max(y.len());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(x, y) as f64 / longest as f64
}
