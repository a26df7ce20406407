//! Compressed-row complex matrices assembled from coordinate triplets.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    /// Assembles a square matrix; duplicate entries are summed and exact zeros dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: r.max(c) + 1 });
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry exists") += v;
                continue;
            }
            cols.push(c);
            values.push(v);
            row_ptr[r + 1] += 1;
            last = Some((r, c));
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut m = Self { dim, row_ptr, cols, values };
        m.drop_zeros();
        Ok(m)
    }

    fn drop_zeros(&mut self) {
        if self.values.iter().all(|v| *v != Complex64::new(0.0, 0.0)) {
            return;
        }
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut cols = Vec::with_capacity(self.cols.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(c);
                    values.push(v);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        *self = Self { dim: self.dim, row_ptr, cols, values };
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Nonzero `(column, value)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    /// All `(row, column, value)` entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.row(r).find(|&(cc, _)| cc == c).map_or(Complex64::new(0.0, 0.0), |(_, v)| v)
    }

    /// `out = self * x`.
    pub fn mul_vec_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.mul_vec_into(x, &mut out);
        out
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] += v;
        }
        m
    }

    /// Restriction to the given rows and columns, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Result<Self> {
        let mut position = vec![usize::MAX; self.dim];
        for (new, &old) in indices.iter().enumerate() {
            if old >= self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: old + 1 });
            }
            position[old] = new;
        }
        let mut triplets = Vec::new();
        for (new_r, &old_r) in indices.iter().enumerate() {
            for (c, v) in self.row(old_r) {
                if position[c] != usize::MAX {
                    triplets.push((new_r, position[c], v));
                }
            }
        }
        Self::from_triplets(indices.len(), triplets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn duplicates_sum_and_zeros_drop() {
        let m = CsrMatrix::from_triplets(3, vec![(0, 1, c(1.0)), (2, 2, c(3.0)), (0, 1, c(2.0)), (1, 0, c(0.0))]).unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), c(3.0));
        assert_eq!(m.get(1, 0), c(0.0));
        let y = m.mul_vec(&[c(1.0), c(2.0), c(3.0)]);
        assert_eq!(y, vec![c(6.0), c(0.0), c(9.0)]);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(CsrMatrix::from_triplets(2, vec![(2, 0, c(1.0))]).is_err());
    }

    #[test]
    fn submatrix_reorders() {
        let m = CsrMatrix::from_triplets(3, vec![(0, 2, c(5.0)), (2, 0, c(7.0)), (1, 1, c(1.0))]).unwrap();
        let s = m.submatrix(&[2, 0]).unwrap();
        assert_eq!(s.get(0, 1), c(7.0));
        assert_eq!(s.get(1, 0), c(5.0));
        assert_eq!(s.nnz(), 2);
    }
}
