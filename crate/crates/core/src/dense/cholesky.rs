//! Cholesky factorization that stops early once the factor becomes too
//! ill-conditioned, keeping the leading well-conditioned part.

use serde::{Deserialize, Serialize};

use super::{DenseMatrix, IceState};
use crate::error::{Error, Result};

/// How the condition number of the growing factor is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionMonitor {
    /// Incremental estimate, `O(j)` per column.
    #[default]
    Ice,
    /// Exact singular values of the leading block, `O(j^3)` per column.
    Svd,
}

impl std::str::FromStr for ConditionMonitor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ice" => Ok(Self::Ice),
            "svd" => Ok(Self::Svd),
            other => Err(Error::param(
                "monitor",
                format!("expected ice or svd, got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StopReason {
    /// Every column was accepted.
    Complete,
    /// Column `p + 1` pushed the condition estimate past the bound.
    ConditionExceeded { kappa: f64 },
    /// Column `p + 1` had a nonpositive pivot.
    NonPositivePivot { pivot: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialCholeskyResult {
    /// Number of accepted columns.
    pub p: usize,
    /// `p x p` upper-triangular factor with positive diagonal.
    pub r: DenseMatrix,
    /// Condition estimate after each column, including a rejected column when
    /// the stop was due to conditioning.
    pub kappa_trace: Vec<f64>,
    pub stop: StopReason,
}

/// Up-looking Cholesky of the symmetric matrix `g`.
///
/// Column `j` of the factor depends only on `g[..=j, ..=j]`, so running on any
/// leading block at least `p` wide gives the same `p` and the same bits.
/// Columns are accepted while the condition estimate stays `<= omega`.
pub fn partial_cholesky(
    g: &DenseMatrix,
    omega: f64,
    monitor: ConditionMonitor,
) -> Result<PartialCholeskyResult> {
    let m = g.rows();
    if m == 0 || g.cols() != m {
        return Err(Error::DimensionMismatch {
            expected: m.max(1),
            got: g.cols(),
        });
    }
    if !(omega > 1.0) {
        return Err(Error::param("omega", format!("must exceed 1, got {omega}")));
    }
    if !g.is_finite() {
        return Err(Error::NonFinite("Gram matrix"));
    }
    let asym_tol = 4.0 * f64::EPSILON * g.frobenius_norm();
    for j in 0..m {
        for i in 0..j {
            if (g[(i, j)] - g[(j, i)]).abs() > asym_tol {
                return Err(Error::param("gram", format!("not symmetric at ({i}, {j})")));
            }
        }
    }

    let mut r = DenseMatrix::zeros(m, m);
    let mut trace = Vec::with_capacity(m);
    let mut ice: Option<IceState> = None;
    let mut stop = StopReason::Complete;
    let mut p = m;

    for j in 0..m {
        for i in 0..j {
            let mut acc = g[(i, j)];
            for k in 0..i {
                acc -= r[(k, i)] * r[(k, j)];
            }
            r[(i, j)] = acc / r[(i, i)];
        }
        let mut pivot = g[(j, j)];
        for k in 0..j {
            pivot -= r[(k, j)] * r[(k, j)];
        }
        if !(pivot > 0.0) {
            if j == 0 {
                return Err(Error::CholeskyBreakdown { pivot });
            }
            stop = StopReason::NonPositivePivot { pivot };
            p = j;
            break;
        }
        r[(j, j)] = pivot.sqrt();

        let kappa = match monitor {
            ConditionMonitor::Ice => match ice.as_mut() {
                None => {
                    ice = Some(IceState::new(r[(0, 0)])?);
                    1.0
                }
                Some(state) => state.update(&r.col(j)[..=j])?,
            },
            ConditionMonitor::Svd => super::svd_condition(&r.leading(j + 1, j + 1)),
        };
        trace.push(kappa);
        if kappa > omega || kappa.is_nan() {
            if j == 0 {
                return Err(Error::CholeskyBreakdown { pivot });
            }
            stop = StopReason::ConditionExceeded { kappa };
            p = j;
            break;
        }
    }

    Ok(PartialCholeskyResult {
        p,
        r: r.leading(p, p),
        kappa_trace: trace,
        stop,
    })
}
