//! The operator a Krylov solver iterates with.

use crate::error::Result;
use crate::sparse::{Ilu0Preconditioner, SparseMatrix};

pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = op(x)`.
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()>;
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.spmv_into(x, y)
    }
}

/// `M⁻¹A` with an optional ILU(0) preconditioner applied on the left.
#[derive(Debug, Clone, Copy)]
pub struct LeftPreconditioned<'a> {
    a: &'a SparseMatrix,
    m: Option<&'a Ilu0Preconditioner>,
}

impl<'a> LeftPreconditioned<'a> {
    pub fn new(a: &'a SparseMatrix, m: Option<&'a Ilu0Preconditioner>) -> Self {
        Self { a, m }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        self.a
    }

    /// `M⁻¹r` (identity without a preconditioner).
    pub fn precondition(&self, r: &mut [f64]) -> Result<()> {
        match self.m {
            Some(m) => m.apply_in_place(r),
            None => Ok(()),
        }
    }

    /// `M⁻¹(b − Ax)`.
    pub fn residual(&self, b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.a.spmv(x)?;
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        self.precondition(&mut r)?;
        Ok(r)
    }
}

impl LinearOperator for LeftPreconditioned<'_> {
    fn dim(&self) -> usize {
        self.a.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.a.spmv_into(x, y)?;
        self.precondition(y)
    }
}
