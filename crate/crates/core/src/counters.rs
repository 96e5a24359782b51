//! Communication accounting.
//!
//! A "reduction" is any operation that would need a global collective on a
//! distributed machine: a dot product, a norm, a block inner product or a Gram
//! matrix. Operator applications are tracked separately since they only need
//! neighbour exchanges.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionCounter {
    /// Gram-matrix products (CholQR).
    pub gram_products: u64,
    /// Projection inner products (block `QᵀV` or a single MGS dot).
    pub projections: u64,
    /// Vector norms used for normalisation.
    pub norms: u64,
    /// Norms of explicitly recomputed residuals.
    pub true_residual_checks: u64,
    /// Operator applications inside the solve proper.
    pub spmv: u64,
    /// Reductions spent harvesting Ritz values before the solve.
    pub harvest_reductions: u64,
    /// Operator applications spent harvesting Ritz values.
    pub harvest_spmv: u64,
}

impl ReductionCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reductions attributed to orthogonalization.
    pub fn ortho_reductions(&self) -> u64 {
        self.gram_products + self.projections + self.norms
    }

    /// All reductions of the solve proper (harvest excluded).
    pub fn solve_reductions(&self) -> u64 {
        self.ortho_reductions() + self.true_residual_checks
    }

    pub fn total_reductions(&self) -> u64 {
        self.solve_reductions() + self.harvest_reductions
    }

    pub fn total_spmv(&self) -> u64 {
        self.spmv + self.harvest_spmv
    }
}

impl std::ops::AddAssign for ReductionCounter {
    fn add_assign(&mut self, o: Self) {
        self.gram_products += o.gram_products;
        self.projections += o.projections;
        self.norms += o.norms;
        self.true_residual_checks += o.true_residual_checks;
        self.spmv += o.spmv;
        self.harvest_reductions += o.harvest_reductions;
        self.harvest_spmv += o.harvest_spmv;
    }
}
