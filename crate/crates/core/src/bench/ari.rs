use std::collections::HashMap;

use crate::error::{Result, SkeletonError};

#[inline]
fn pairs(n: u64) -> u128 {
    let n = n as u128;
    n * n.saturating_sub(1) / 2
}

/// Adjusted Rand index (Hubert–Arabie) between two labelings.
///
/// Pair counts are accumulated exactly in integers; only the final ratio is
/// taken in floating point. Identical trivial partitions (all one cluster or
/// all singletons on both sides) score 1.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(SkeletonError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let n = a.len() as u64;
    let mut table: HashMap<(usize, usize), u64> = HashMap::new();
    let mut rows: HashMap<usize, u64> = HashMap::new();
    let mut cols: HashMap<usize, u64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let index: u128 = table.values().map(|&c| pairs(c)).sum();
    let sum_a: u128 = rows.values().map(|&c| pairs(c)).sum();
    let sum_b: u128 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(n);
    if total == 0 {
        return Ok(1.0);
    }
    let expected = sum_a as f64 * sum_b as f64 / total as f64;
    let max_index = 0.5 * (sum_a as f64 + sum_b as f64);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((index as f64 - expected) / denom)
}
