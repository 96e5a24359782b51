use super::ChangeOfBasis;
use crate::dense::{norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::par;

/// Column norms above this stop the kernel early.
pub const OVERFLOW_LIMIT: f64 = 1e10 / 1.490_116_119_384_765_6e-8;

const CHUNK: usize = 4096;

/// `N x (s+1)` basis block `[q, p₁(A)q, …, p_s(A)q]`.
#[derive(Debug, Clone)]
pub struct KrylovBlock {
    pub v: DenseMatrix,
    /// Steps actually generated (columns minus one).
    pub s: usize,
    /// Set when the kernel stopped early because a column overflowed.
    pub truncated: bool,
}

/// Generate up to `s` basis vectors from the unit vector `q`, one operator
/// application each. Trivial coefficients (`θ = 0`, `γ = 1`, `β = 0`) are
/// skipped, so the monomial basis is bitwise the repeated operator.
pub fn matrix_powers_kernel(
    op: &dyn LinearOperator,
    q: &[f64],
    s: usize,
    basis: &ChangeOfBasis,
) -> Result<KrylovBlock> {
    let n = op.dim();
    if q.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q.len(),
        });
    }
    if s == 0 || s > basis.s() {
        return Err(Error::param(
            "s",
            format!("need 1 <= s <= {} basis steps, got {s}", basis.s()),
        ));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("starting vector"));
    }
    let qn = norm2(q);
    if (qn - 1.0).abs() > 1e-8 {
        return Err(Error::param(
            "q",
            format!("starting vector must have unit norm, got {qn}"),
        ));
    }

    let mut v = DenseMatrix::zeros(n, s + 1);
    v.col_mut(0).copy_from_slice(q);
    let mut steps = s;
    let mut truncated = false;

    for k in 0..s {
        let theta = basis.diag()[k];
        let gamma = basis.subdiag()[k];
        let beta = basis.pair_coupling()[k];
        let (done, rest) = v.as_mut_slice().split_at_mut((k + 1) * n);
        let vk = &done[k * n..];
        let prev = if k > 0 {
            Some(&done[(k - 1) * n..k * n])
        } else {
            None
        };
        let next = &mut rest[..n];
        op.apply(vk, next)?;
        if theta != 0.0 || beta != 0.0 || gamma != 1.0 {
            par::for_each_chunk_mut(next, CHUNK, |c, out| {
                let off = c * CHUNK;
                for (i, y) in out.iter_mut().enumerate() {
                    let mut t = *y;
                    if theta != 0.0 {
                        t -= theta * vk[off + i];
                    }
                    if beta != 0.0 {
                        if let Some(p) = prev {
                            t -= beta * p[off + i];
                        }
                    }
                    if gamma != 1.0 {
                        t /= gamma;
                    }
                    *y = t;
                }
            });
        }
        let nrm = norm2(next);
        if !nrm.is_finite() || nrm > OVERFLOW_LIMIT {
            log::warn!(
                "basis column {} overflowed (norm {nrm:e}); block cut to {k} steps",
                k + 1
            );
            steps = k;
            truncated = true;
            break;
        }
    }

    if truncated {
        v.truncate_cols(steps + 1);
    }
    Ok(KrylovBlock {
        v,
        s: steps,
        truncated,
    })
}
