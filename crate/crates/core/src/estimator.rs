//! Communication-free prediction of the largest safe first block size for the
//! scaled Newton basis.
//!
//! Row `i` of the auxiliary matrix `E` follows the product of
//! `|θᵢ − θ_k| / |θ̄ − θ_k|` over the shifts applied so far, i.e. how the
//! eigencomponent for `θᵢ` evolves. The factor for `k = i` is where that
//! component would be annihilated exactly; in floating point it survives at
//! the level of roundoff, so it is replaced by `ε`. Columns of `E` whose norm
//! grows past a threshold signal basis vectors whose norms blow up.

use serde::{Deserialize, Serialize};

use crate::basis::{gamma_floor, RitzSet};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    /// Largest `j` with `‖E_j‖ < threshold`, at least 1.
    pub s0_star: usize,
    /// `‖E_j‖₂` for each column; may be `+∞` where the products overflow.
    pub col_norms: Vec<f64>,
    /// `log₁₀ ‖E_j‖₂`, always finite.
    pub log10_col_norms: Vec<f64>,
    /// Norms of the strictly lower triangular part (no roundoff terms).
    pub col_norms_lower: Vec<f64>,
    pub threshold: f64,
    pub eps_model: f64,
}

/// Natural log of every entry of `E`, `s x s`, row-major. Entries of the
/// strictly upper part are finite; so is everything when `ε_model > 0`.
fn log_auxiliary(ritz: &RitzSet, eps_model: f64) -> Vec<Vec<f64>> {
    let theta = ritz.values();
    let s = theta.len();
    let mean = ritz.mean_real();
    let floor = gamma_floor(ritz.max_abs());
    let ln_den: Vec<f64> = theta
        .iter()
        .map(|t| (t - mean).norm().max(floor).ln())
        .collect();
    let ln_eps = eps_model.ln();

    crate::par::map_range(s, |i| {
        // factor k of row i
        let ln_factor = |k: usize| -> f64 {
            let d = (theta[i] - theta[k]).norm();
            if k == i || d == 0.0 {
                ln_eps
            } else {
                d.ln() - ln_den[k]
            }
        };
        let mut row = vec![0.0; s];
        let mut acc = 0.0;
        for (j, e) in row.iter_mut().enumerate() {
            // column j (0-based) carries the product over k < j
            if j > 0 {
                acc += ln_factor(j - 1);
            }
            *e = if j == i { acc + ln_eps } else { acc };
        }
        row
    })
}

fn log_column_norm(entries: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = entries.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let sum: f64 = entries.map(|l| (2.0 * (l - m)).exp()).sum();
    m + 0.5 * sum.ln()
}

pub fn estimate_initial_step(
    ritz: &RitzSet,
    omega_est: f64,
    eps_model: f64,
) -> Result<EstimatorReport> {
    if ritz.is_empty() {
        return Err(Error::param("ritz", "no Ritz values"));
    }
    if !(omega_est > 1.0) {
        return Err(Error::param(
            "omega_est",
            format!("must exceed 1, got {omega_est}"),
        ));
    }
    if !(eps_model > 0.0) {
        return Err(Error::param(
            "eps_model",
            format!("must be positive, got {eps_model}"),
        ));
    }
    let s = ritz.len();
    let ln_e = log_auxiliary(ritz, eps_model);

    let ln_norms: Vec<f64> = (0..s)
        .map(|j| log_column_norm((0..s).map(|i| ln_e[i][j])))
        .collect();
    let ln_lower: Vec<f64> = (0..s)
        .map(|j| log_column_norm((j + 1..s).map(|i| ln_e[i][j])))
        .collect();

    let ln_omega = omega_est.ln();
    let s0_star = (0..s)
        .rev()
        .find(|&j| ln_norms[j] < ln_omega)
        .map_or(1, |j| j + 1);

    Ok(EstimatorReport {
        s0_star,
        col_norms: ln_norms.iter().map(|l| l.exp()).collect(),
        log10_col_norms: ln_norms
            .iter()
            .map(|l| l / std::f64::consts::LN_10)
            .collect(),
        col_norms_lower: ln_lower.iter().map(|l| l.exp()).collect(),
        threshold: omega_est,
        eps_model,
    })
}

/// `E` evaluated with plain products, for checking the log-space path on
/// spectra small enough not to overflow.
pub fn auxiliary_matrix_direct(ritz: &RitzSet, eps_model: f64) -> DenseMatrix {
    let theta = ritz.values();
    let s = theta.len();
    let mean = ritz.mean_real();
    let floor = gamma_floor(ritz.max_abs());
    DenseMatrix::from_fn(s, s, |i, j| {
        let mut e = if j == i { eps_model } else { 1.0 };
        for k in 0..j {
            let d = (theta[i] - theta[k]).norm();
            e *= if k == i || d == 0.0 {
                eps_model
            } else {
                d / (theta[k] - mean).norm().max(floor)
            };
        }
        e
    })
}
