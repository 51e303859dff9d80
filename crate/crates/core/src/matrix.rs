//! Packed storage for real symmetric matrices.

use crate::error::{Error, Result};

/// Real symmetric matrix stored as its upper triangle (diagonal included),
/// row by row. Symmetry holds by construction: `get(i, j)` and `get(j, i)`
/// read the same slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            upper: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds a matrix by evaluating `f(i, j)` for every `i <= j`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        Self { n, upper }
    }

    /// Builds from a row-major dense `n x n` buffer, rejecting asymmetric or
    /// non-finite input.
    pub fn from_dense(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: dense.len(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let a = dense[i * n + j];
                if !a.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
                if a != dense[j * n + i] {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self::from_upper_fn(n, |i, j| dense[i * n + j]))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut dense = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            dense.extend_from_slice(row);
        }
        Self::from_dense(n, &dense)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * (2 * self.n - i - 1) / 2 + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.upper[self.offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.offset(i, j);
        self.upper[k] = value;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let a = self.get(i, j);
                out[i * n + j] = a;
                out[j * n + i] = a;
            }
        }
        out
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(x.len(), n, "mat_vec dimension");
        let mut y = vec![0.0; n];
        let mut k = 0;
        for i in 0..n {
            let xi = x[i];
            let mut acc = self.upper[k] * xi;
            k += 1;
            for j in i + 1..n {
                let a = self.upper[k];
                acc += a * x[j];
                y[j] += a * xi;
                k += 1;
            }
            y[i] += acc;
        }
        y
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, other: &SymmetricMatrix, scale: f64) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        let upper = self
            .upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| a + scale * b)
            .collect();
        Ok(Self { n: self.n, upper })
    }

    pub fn shift_diagonal(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let k = out.offset(i, i);
            out.upper[k] += c;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                let a = self.get(i, j);
                s += if i == j { a * a } else { 2.0 * a * a };
            }
        }
        s.sqrt()
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// True when Gershgorin discs certify positive semi-definiteness.
    pub fn gershgorin_psd(&self) -> bool {
        (0..self.n).all(|i| {
            let off: f64 = (0..self.n)
                .filter(|&j| j != i)
                .map(|j| self.get(i, j).abs())
                .sum();
            self.get(i, i) - off >= 0.0
        })
    }

    /// Deletes row and column `k` (zero-based).
    pub(crate) fn without_index(&self, k: usize) -> Self {
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != k).collect();
        Self::from_upper_fn(keep.len(), |i, j| self.get(keep[i], keep[j]))
    }

    /// Packed upper triangle, row by row, diagonal included.
    pub fn upper_entries(&self) -> &[f64] {
        &self.upper
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_offsets_cover_upper_triangle() {
        let n = 5;
        let m = SymmetricMatrix::from_upper_fn(n, |i, j| (10 * i + j) as f64);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                assert_eq!(m.get(i, j), (10 * a + b) as f64);
            }
        }
    }

    #[test]
    fn dense_round_trip_and_asymmetry() {
        let dense = [1.0, 2.0, 2.0, 3.0];
        let m = SymmetricMatrix::from_dense(2, &dense).unwrap();
        assert_eq!(m.to_dense(), dense.to_vec());
        assert_eq!(
            SymmetricMatrix::from_dense(2, &[1.0, 2.0, 2.5, 3.0]),
            Err(Error::NotSymmetric { row: 0, col: 1 })
        );
    }

    #[test]
    fn mat_vec_matches_dense() {
        let m = SymmetricMatrix::from_upper_fn(4, |i, j| (i + 2 * j) as f64 - 1.5);
        let x = [0.5, -1.0, 2.0, 0.25];
        let dense = m.to_dense();
        let y = m.mat_vec(&x);
        for i in 0..4 {
            let expect: f64 = (0..4).map(|j| dense[i * 4 + j] * x[j]).sum();
            assert!((y[i] - expect).abs() < 1e-12);
        }
    }
}
