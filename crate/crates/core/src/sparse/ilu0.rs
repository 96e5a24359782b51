//! Zero fill-in incomplete LU.

use super::SparseMatrix;
use crate::error::{Error, Result};

/// ILU(0) factors stored on the sparsity pattern of `A`.
///
/// The strictly lower part holds `L` (unit diagonal implicit), the diagonal and
/// upper part hold `U`.
#[derive(Debug, Clone)]
pub struct Ilu0Preconditioner {
    lu: SparseMatrix,
    diag_pos: Vec<usize>,
}

impl Ilu0Preconditioner {
    /// Factor `a` in IKJ order. Fails if a diagonal entry is structurally
    /// missing or a pivot becomes zero.
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.n();
        let mut lu = a.clone();
        let row_ptr = a.row_ptr().to_vec();
        let col_idx = a.col_idx().to_vec();

        let mut diag_pos = Vec::with_capacity(n);
        for r in 0..n {
            let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            match cols.binary_search(&r) {
                Ok(k) => diag_pos.push(row_ptr[r] + k),
                Err(_) => return Err(Error::ZeroPivot { row: r }),
            }
        }

        // column -> position within the current row, usize::MAX when absent
        let mut pos = vec![usize::MAX; n];
        let vals = lu.values_mut();
        for i in 0..n {
            let (start, end) = (row_ptr[i], row_ptr[i + 1]);
            for idx in start..end {
                pos[col_idx[idx]] = idx;
            }
            for idx in start..diag_pos[i] {
                let k = col_idx[idx];
                let pivot = vals[diag_pos[k]];
                if pivot == 0.0 {
                    return Err(Error::ZeroPivot { row: k });
                }
                let lik = vals[idx] / pivot;
                vals[idx] = lik;
                for kj in diag_pos[k] + 1..row_ptr[k + 1] {
                    let target = pos[col_idx[kj]];
                    if target != usize::MAX {
                        vals[target] -= lik * vals[kj];
                    }
                }
            }
            let d = vals[diag_pos[i]];
            if d == 0.0 || !d.is_finite() {
                return Err(Error::ZeroPivot { row: i });
            }
            for idx in start..end {
                pos[col_idx[idx]] = usize::MAX;
            }
        }
        Ok(Self { lu, diag_pos })
    }

    pub fn n(&self) -> usize {
        self.lu.n()
    }

    /// Combined factors, `L` strictly below and `U` on and above the diagonal.
    pub fn factors(&self) -> &SparseMatrix {
        &self.lu
    }

    /// `z = (LU)^{-1} r`.
    pub fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        let mut z = r.to_vec();
        self.apply_in_place(&mut z)?;
        Ok(z)
    }

    pub fn apply_in_place(&self, z: &mut [f64]) -> Result<()> {
        let n = self.n();
        if z.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: z.len(),
            });
        }
        let rp = self.lu.row_ptr();
        let ci = self.lu.col_idx();
        let v = self.lu.values();
        for i in 0..n {
            let mut acc = z[i];
            for idx in rp[i]..self.diag_pos[i] {
                acc -= v[idx] * z[ci[idx]];
            }
            z[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = z[i];
            for idx in self.diag_pos[i] + 1..rp[i + 1] {
                acc -= v[idx] * z[ci[idx]];
            }
            z[i] = acc / v[self.diag_pos[i]];
        }
        Ok(())
    }
}
