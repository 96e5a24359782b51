//! Restarted GMRES drivers: the MGS baseline and adaptive s-step GMRES.
//!
//! Both solve the left-preconditioned, optionally equilibrated system
//! `M⁻¹A'x' = M⁻¹D_r b` with `A' = D_r A D_c`, and return `x = D_c x'`.
//! Reported residuals are those of the preconditioned system relative to the
//! initial one.

mod adaptive;
mod arnoldi;
mod state;

pub use adaptive::{adaptive_sstep_gmres, assemble_hessenberg};
pub use arnoldi::{gmres_baseline, ritz_harvest};
pub use state::{LooTracker, OrthoState};

use serde::{Deserialize, Serialize};

use crate::basis::BasisKind;
use crate::counters::ReductionCounter;
use crate::dense::{norm2, ConditionMonitor};
use crate::error::{Error, Result};
use crate::estimator::EstimatorReport;
use crate::operator::LeftPreconditioned;
use crate::sparse::{
    equilibrate, Equilibration, EquilibrationMode, Ilu0Preconditioner, SparseMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecondKind {
    #[default]
    None,
    Ilu0,
}

impl std::str::FromStr for PrecondKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "ilu0" => Ok(Self::Ilu0),
            other => Err(Error::param(
                "precond",
                format!("expected none or ilu0, got {other:?}"),
            )),
        }
    }
}

impl std::fmt::Display for PrecondKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Ilu0 => "ilu0",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Gmres,
    Adaptive,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Gmres => "gmres",
            Self::Adaptive => "adaptive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub basis: BasisKind,
    /// Initial step size.
    pub s0: usize,
    /// Condition bound for partial Cholesky.
    pub omega: f64,
    /// Threshold of the initial step-size estimator.
    pub omega_est: f64,
    /// Cap `s0` by the estimator prediction (scaled Newton only).
    pub use_estimator: bool,
    /// Restart length `m`.
    pub restart: usize,
    /// Number of restart cycles allowed.
    pub max_restarts: usize,
    pub rel_tol: f64,
    pub precond: PrecondKind,
    pub equilibrate: EquilibrationMode,
    /// Track `‖I − QᵀQ‖_F` per iteration.
    pub loo: bool,
    /// Roundoff level assumed by the estimator.
    pub eps_model: f64,
    pub monitor: ConditionMonitor,
    /// Recompute `‖AQ − QH‖_F` after every block with extra operator
    /// applications (not counted). Diagnostic only.
    pub verify_arnoldi: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            basis: BasisKind::Monomial,
            s0: 10,
            omega: 1e7,
            omega_est: 0.1 / f64::EPSILON.sqrt(),
            use_estimator: false,
            restart: 100,
            max_restarts: 1,
            rel_tol: 1e-10,
            precond: PrecondKind::None,
            equilibrate: EquilibrationMode::None,
            loo: true,
            eps_model: crate::UNIT_ROUNDOFF,
            monitor: ConditionMonitor::Ice,
            verify_arnoldi: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restart == 0 {
            return Err(Error::param("restart", "must be at least 1"));
        }
        if self.s0 == 0 || self.s0 > self.restart {
            return Err(Error::param(
                "s0",
                format!(
                    "must satisfy 1 <= s0 <= restart ({}), got {}",
                    self.restart, self.s0
                ),
            ));
        }
        if self.max_restarts == 0 {
            return Err(Error::param("max_restarts", "must be at least 1"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::param(
                "tol",
                format!("must be positive, got {}", self.rel_tol),
            ));
        }
        if !(self.omega > 1.0) {
            return Err(Error::param(
                "omega",
                format!("must exceed 1, got {}", self.omega),
            ));
        }
        if !(self.omega_est > 1.0) {
            return Err(Error::param(
                "omega_est",
                format!("must exceed 1, got {}", self.omega_est),
            ));
        }
        if !(self.eps_model > 0.0) {
            return Err(Error::param(
                "eps_model",
                format!("must be positive, got {}", self.eps_model),
            ));
        }
        Ok(())
    }
}

/// One accepted iteration (one new basis vector).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    /// 1-based, counted across restarts.
    pub iter: usize,
    pub rel_res: f64,
    pub loo: Option<f64>,
    /// Size of the block this iteration belongs to.
    pub block_size: usize,
    pub reductions_cum: u64,
    pub spmv_cum: u64,
}

/// One block iteration of the adaptive solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub cycle: usize,
    /// Iteration index of the block's first column.
    pub first_iter: usize,
    pub requested: usize,
    /// Columns kept by the first and second Cholesky QR.
    pub p1: usize,
    pub p: usize,
    /// Columns used by the solution (fewer than `p` only at convergence).
    pub accepted: usize,
    /// Single-vector step taken after a total breakdown.
    pub fallback: bool,
    pub kappa_first: Vec<f64>,
    pub kappa_second: Vec<f64>,
    /// `‖AQ − QH‖_F` and `‖AQ‖_F` when verification is on.
    pub arnoldi_residual: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub solver: SolverKind,
    pub rows: Vec<TraceRow>,
    pub blocks: Vec<BlockRecord>,
    #[serde(skip)]
    pub x: Vec<f64>,
    pub converged: bool,
    /// The solve stopped on an unrecoverable breakdown.
    pub breakdown: bool,
    pub cycles: usize,
    pub counters: ReductionCounter,
    /// Block iterations per cycle (for the baseline: iterations per cycle).
    pub iterations_per_cycle: Vec<usize>,
    /// `‖M⁻¹(b − Ax₀)‖` of the scaled system.
    pub initial_residual: f64,
    /// Recomputed residual of the returned iterate, relative.
    pub final_rel_residual: f64,
    /// `‖b − Ax‖ / ‖b − Ax₀‖` for the original, unscaled system.
    pub final_rel_residual_unpreconditioned: f64,
    pub s0_used: usize,
    pub estimator: Option<EstimatorReport>,
    pub ritz_count: usize,
    pub equilibration_alpha: Option<f64>,
    /// Krylov vectors generated but discarded by truncation.
    pub wasted_columns: usize,
}

impl SolveTrace {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.p).collect()
    }

    pub fn final_loo(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.loo)
    }
}

/// The scaled and preconditioned problem both solvers work on.
pub(crate) struct Prepared {
    pub a: SparseMatrix,
    pub ilu: Option<Ilu0Preconditioner>,
    pub eq: Equilibration,
    pub b: Vec<f64>,
    pub x0: Vec<f64>,
    pub counters: ReductionCounter,
    pub alpha: Option<f64>,
}

impl Prepared {
    pub fn op(&self) -> LeftPreconditioned<'_> {
        LeftPreconditioned::new(&self.a, self.ilu.as_ref())
    }
}

pub(crate) fn prepare(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<Prepared> {
    cfg.validate()?;
    let n = a.n();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("right-hand side"));
    }
    if b.iter().all(|&v| v == 0.0) {
        return Err(Error::param("b", "right-hand side is zero"));
    }
    let x0 = match x0 {
        Some(x) if x.len() != n => {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            })
        }
        Some(x) if x.iter().any(|v| !v.is_finite()) => {
            return Err(Error::NonFinite("initial guess"))
        }
        Some(x) => x.to_vec(),
        None => vec![0.0; n],
    };

    let mut counters = ReductionCounter::new();
    let mut alpha = None;
    let (a_eq, eq) = match cfg.equilibrate {
        EquilibrationMode::Scalar => {
            let ilu = match cfg.precond {
                PrecondKind::Ilu0 => Some(Ilu0Preconditioner::factor(a)?),
                PrecondKind::None => None,
            };
            let op = LeftPreconditioned::new(a, ilu.as_ref());
            let r = op.residual(b, &x0)?;
            let steps = cfg.s0.min(n);
            let ritz = ritz_harvest(&op, &r, steps, &mut counters)?;
            let radius = ritz.max_abs();
            alpha = Some(radius);
            equilibrate(a, EquilibrationMode::Scalar, Some(radius))?
        }
        mode => equilibrate(a, mode, None)?,
    };
    let ilu = match cfg.precond {
        PrecondKind::Ilu0 => Some(Ilu0Preconditioner::factor(&a_eq)?),
        PrecondKind::None => None,
    };
    let b_eq = eq.scale_rhs(b);
    let x0_eq = eq.scale_solution(&x0);
    Ok(Prepared {
        a: a_eq,
        ilu,
        eq,
        b: b_eq,
        x0: x0_eq,
        counters,
        alpha,
    })
}

/// `‖b − Ax‖ / ‖b − Ax₀‖` on the original system (not counted).
pub(crate) fn unpreconditioned_ratio(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    x: &[f64],
) -> Result<f64> {
    let res = |x: &[f64]| -> Result<f64> {
        let ax = a.spmv(x)?;
        Ok(norm2(
            &b.iter()
                .zip(&ax)
                .map(|(bi, ai)| bi - ai)
                .collect::<Vec<_>>(),
        ))
    };
    let r0 = match x0 {
        Some(x0) => res(x0)?,
        None => norm2(b),
    };
    Ok(res(x)? / r0)
}
