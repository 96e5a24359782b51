//! Sparse matrix storage and everything that only needs the matrix itself.

mod equilibrate;
mod generators;
mod ilu0;
mod matrix_market;

pub use equilibrate::{equilibrate, Equilibration, EquilibrationMode};
pub use generators::{gen_diagonal, gen_laplace, LaplaceDims, ProblemSpec};
pub use ilu0::Ilu0Preconditioner;
pub use matrix_market::{parse_matrix_market, read_matrix_market};

use crate::error::{Error, Result};
use crate::par;

/// Rows per parallel work item in SpMV.
const SPMV_ROW_CHUNK: usize = 2048;

/// Square real sparse matrix in compressed sparse row form.
///
/// Column indices are strictly increasing within each row and there are no
/// duplicate entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Build from raw CSR arrays, validating every structural invariant.
    pub fn try_from_csr(
        n: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                got: row_ptr.len(),
            });
        }
        if row_ptr[0] != 0 || row_ptr[n] != col_idx.len() || col_idx.len() != values.len() {
            return Err(Error::param("row_ptr", "inconsistent CSR array lengths"));
        }
        for r in 0..n {
            if row_ptr[r] > row_ptr[r + 1] {
                return Err(Error::param("row_ptr", format!("decreasing at row {r}")));
            }
            let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            for (k, &c) in cols.iter().enumerate() {
                if c >= n {
                    return Err(Error::param(
                        "col_idx",
                        format!("column {c} out of range in row {r}"),
                    ));
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::param(
                        "col_idx",
                        format!("columns not strictly increasing in row {r}"),
                    ));
                }
            }
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Assemble from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; n + 1];
        for &(r, c, _) in triplets {
            if r >= n || c >= n {
                return Err(Error::param(
                    "triplet",
                    format!("entry ({r}, {c}) outside a {n}x{n} matrix"),
                ));
            }
            counts[r + 1] += 1;
        }
        for r in 0..n {
            counts[r + 1] += counts[r];
        }
        let mut fill = counts.clone();
        let mut entries = vec![(0usize, 0.0f64); triplets.len()];
        for &(r, c, v) in triplets {
            entries[fill[r]] = (c, v);
            fill[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for r in 0..n {
            let row = &mut entries[counts[r]..counts[r + 1]];
            // stable sort keeps duplicate summation order equal to input order
            row.sort_by_key(|&(c, _)| c);
            for &(c, v) in row.iter() {
                if col_idx.len() > row_ptr[r] && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    /// Sparse copy of a dense row-major matrix (exact zeros dropped).
    pub fn from_dense(n: usize, dense: &[f64]) -> Self {
        assert_eq!(dense.len(), n * n);
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for r in 0..n {
            for c in 0..n {
                let v = dense[r * n + c];
                if v != 0.0 {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Row-major dense copy, for tests and small diagnostics.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n * self.n];
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                d[r * self.n + c] = v;
            }
        }
        d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Value at `(r, c)`, zero when structurally absent.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[range.clone()].binary_search(&c) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Euclidean norm of every column.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.n];
        for (&c, &v) in self.col_idx.iter().zip(&self.values) {
            sq[c] += v * v;
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// `y = A x`, accumulated left to right within each row.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if y.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        par::for_each_chunk_mut(y, SPMV_ROW_CHUNK, |chunk_no, out| {
            let first = chunk_no * SPMV_ROW_CHUNK;
            for (k, yr) in out.iter_mut().enumerate() {
                let r = first + k;
                let mut acc = 0.0;
                for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                    acc += self.values[idx] * x[self.col_idx[idx]];
                }
                *yr = acc;
            }
        });
        Ok(())
    }

    /// Copy with `value(r, c) * row_scale[r] * col_scale[c]`.
    pub fn scaled(&self, row_scale: &[f64], col_scale: &[f64]) -> Self {
        let mut out = self.clone();
        for r in 0..self.n {
            for idx in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.values[idx] = row_scale[r] * self.values[idx] * col_scale[self.col_idx[idx]];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates_and_sort() {
        let a =
            SparseMatrix::from_triplets(2, &[(0, 1, 2.0), (0, 0, 1.0), (0, 1, 3.0), (1, 1, 4.0)])
                .unwrap();
        assert_eq!(a.row_ptr(), &[0, 2, 3]);
        assert_eq!(a.col_idx(), &[0, 1, 1]);
        assert_eq!(a.values(), &[1.0, 5.0, 4.0]);
    }

    #[test]
    fn identity_spmv() {
        let a = SparseMatrix::identity(2);
        assert_eq!(a.spmv(&[3.0, -1.0]).unwrap(), vec![3.0, -1.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        let a = SparseMatrix::identity(3);
        assert!(matches!(
            a.spmv(&[1.0, 2.0]),
            Err(Error::DimensionMismatch {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn try_from_csr_rejects_unsorted_columns() {
        let err = SparseMatrix::try_from_csr(2, vec![0, 2, 2], vec![1, 0], vec![1.0, 1.0]);
        assert!(err.is_err());
        let err = SparseMatrix::try_from_csr(2, vec![0, 1, 2], vec![0, 2], vec![1.0, 1.0]);
        assert!(err.is_err());
    }

    #[test]
    fn get_and_dense_round_trip() {
        let dense = [1.0, 0.0, 2.0, 0.0, 3.0, 0.0, 4.0, 0.0, 5.0];
        let a = SparseMatrix::from_dense(3, &dense);
        assert_eq!(a.nnz(), 5);
        assert_eq!(a.get(2, 0), 4.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.to_dense(), dense.to_vec());
    }
}
