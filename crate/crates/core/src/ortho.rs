//! Block classical Gram-Schmidt with reorthogonalization, where each block is
//! made orthonormal by a Cholesky QR that keeps only the well-conditioned
//! leading columns.

use crate::counters::ReductionCounter;
use crate::dense::{
    gram, inner_products, partial_cholesky, solve_upper_right_in_place, subtract_product,
    ConditionMonitor, DenseMatrix, StopReason,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BlockQrOutcome {
    /// Accepted new columns.
    pub p: usize,
    /// Columns accepted by the first pass, `p <= p1`.
    pub p1: usize,
    /// `N x p`, orthonormal and orthogonal to the previous basis.
    pub q_new: DenseMatrix,
    /// `(i+p) x (p+1)`: `V[:, ..=p] = [Q_prev | Q_new] · R̂`. Column 0 is the
    /// unit vector selecting the seed (the last previous column).
    pub r_hat: DenseMatrix,
    pub reductions: ReductionCounter,
    pub kappa_first: Vec<f64>,
    pub kappa_second: Vec<f64>,
    pub stop_first: StopReason,
    pub stop_second: StopReason,
}

/// Orthogonalize the new columns `V[:, 1..]` of a Krylov block against
/// `q_prev` and among themselves.
///
/// `V[:, 0]` must be the last column of `q_prev` (the block seed); it is
/// never reorthogonalized. An empty `q_prev` stands for `[V[:, 0]]`.
/// Always costs four global reductions: two projections and two Gram
/// matrices. Fails with [`Error::BlockBreakdown`] when not even one new
/// column survives.
pub fn bcgs2_partial_cholqr(
    q_prev: &DenseMatrix,
    v: &DenseMatrix,
    omega: f64,
    monitor: ConditionMonitor,
) -> Result<BlockQrOutcome> {
    let n = v.rows();
    let s = v.cols().saturating_sub(1);
    if s == 0 {
        return Err(Error::param("v", "block has no new columns"));
    }
    let seed_only;
    let q_prev = if q_prev.cols() == 0 {
        seed_only = v.columns(0, 1);
        &seed_only
    } else {
        q_prev
    };
    if q_prev.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q_prev.rows(),
        });
    }
    if !v.is_finite() {
        return Err(Error::NonFinite("Krylov block"));
    }
    let i = q_prev.cols();
    let mut reductions = ReductionCounter::new();

    // first pass
    let mut x = v.columns(1, s + 1);
    let w = inner_products(q_prev, &x);
    reductions.projections += 1;
    subtract_product(&mut x, q_prev, &w);
    let g1 = gram(&x);
    reductions.gram_products += 1;
    let first = match partial_cholesky(&g1, omega, monitor) {
        Ok(c) => c,
        Err(Error::CholeskyBreakdown { .. }) => return Err(Error::BlockBreakdown),
        Err(e) => return Err(e),
    };
    let p1 = first.p;
    let z = first.r;
    x.truncate_cols(p1);
    if !solve_upper_right_in_place(&mut x, &z) {
        return Err(Error::BlockBreakdown);
    }

    // second pass
    let y = inner_products(q_prev, &x);
    reductions.projections += 1;
    subtract_product(&mut x, q_prev, &y);
    let g2 = gram(&x);
    reductions.gram_products += 1;
    let second = match partial_cholesky(&g2, omega, monitor) {
        Ok(c) => c,
        Err(Error::CholeskyBreakdown { .. }) => return Err(Error::BlockBreakdown),
        Err(e) => return Err(e),
    };
    let p = second.p;
    let zt = second.r;
    x.truncate_cols(p);
    if !solve_upper_right_in_place(&mut x, &zt) {
        return Err(Error::BlockBreakdown);
    }

    // combine: [W + Y Z; Z̃ Z] restricted to the first p columns
    let zp = z.leading(p, p);
    let yz = y.columns(0, p).matmul(&zp);
    let bottom = zt.matmul(&zp);
    let mut r_hat = DenseMatrix::zeros(i + p, p + 1);
    r_hat[(i - 1, 0)] = 1.0;
    for c in 0..p {
        for r in 0..i {
            r_hat[(r, c + 1)] = w[(r, c)] + yz[(r, c)];
        }
        for r in 0..=c {
            r_hat[(i + r, c + 1)] = bottom[(r, c)];
        }
    }

    Ok(BlockQrOutcome {
        p,
        p1,
        q_new: x,
        r_hat,
        reductions,
        kappa_first: first.kappa_trace,
        kappa_second: second.kappa_trace,
        stop_first: first.stop,
        stop_second: second.stop,
    })
}
