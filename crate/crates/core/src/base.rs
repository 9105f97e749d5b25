//! Shared domain types: the observation matrix and explicit seeds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SkeletonError};

/// Dense `rows x cols` matrix of finite reals, one observation per row.
///
/// The matrix is immutable once built; knot assignments and edge evidence
/// all index into it by row.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(SkeletonError::invalid(format!(
                "data matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(SkeletonError::DimensionMismatch {
                expected: rows * cols,
                got: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SkeletonError::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, values })
    }

    /// Builds a matrix from equally sized rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(SkeletonError::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, values)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// New matrix holding the given rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            if i >= self.rows {
                return Err(SkeletonError::invalid(format!(
                    "row index {i} out of range for {} rows",
                    self.rows
                )));
            }
            values.extend_from_slice(self.row(i));
        }
        Self::new(indices.len(), self.cols, values)
    }

    /// Column-wise concatenation with zero columns appended.
    pub fn pad_zero_columns(&self, extra: usize) -> Self {
        let cols = self.cols + extra;
        let mut values = Vec::with_capacity(self.rows * cols);
        for r in self.iter_rows() {
            values.extend_from_slice(r);
            values.extend(std::iter::repeat_n(0.0, extra));
        }
        Self {
            rows: self.rows,
            cols,
            values,
        }
    }
}

/// Explicit 64-bit seed. Every stochastic operation takes one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Independent child seed for sub-stream `stream` (restart index,
    /// experiment repeat, ...). SplitMix64 finalizer over the pair.
    pub fn derive(self, stream: u64) -> Seed {
        let mut z = self
            .0
            .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Seed(z ^ (z >> 31))
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn rejects_non_finite() {
        let err = DataMatrix::new(2, 2, vec![0.0, 1.0, f64::NAN, 2.0]).unwrap_err();
        assert!(matches!(err, SkeletonError::NonFinite { row: 1, col: 0 }));
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(DataMatrix::new(0, 3, vec![]).is_err());
        let ragged: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(DataMatrix::from_rows(&ragged).is_err());
    }

    #[test]
    fn row_access() {
        let m = DataMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        assert_eq!(m.rows(), 3);
        assert_eq!(m.row(1), &[3.0, 4.0]);
        let s = m.select_rows(&[2, 0]).unwrap();
        assert_eq!(s.as_slice(), &[5.0, 6.0, 1.0, 2.0]);
        let p = m.pad_zero_columns(2);
        assert_eq!(p.row(2), &[5.0, 6.0, 0.0, 0.0]);
    }

    #[test]
    fn seeds_are_reproducible() {
        let mut r1 = Seed(7).rng();
        let mut r2 = Seed(7).rng();
        for _ in 0..8 {
            assert_eq!(r1.random::<u64>(), r2.random::<u64>());
        }
        assert_ne!(Seed(7).derive(0), Seed(7).derive(1));
        assert_eq!(Seed(7).derive(3), Seed(7).derive(3));
    }
}
