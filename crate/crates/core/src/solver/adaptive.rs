use super::{
    prepare, ritz_harvest, unpreconditioned_ratio, BlockRecord, OrthoState, SolveTrace,
    SolverConfig, SolverKind, TraceRow,
};
use crate::basis::{matrix_powers_kernel, BasisKind, ChangeOfBasis, KrylovBlock};
use crate::counters::ReductionCounter;
use crate::dense::{
    inner_products, norm2, solve_upper_right_in_place, subtract_product, DenseMatrix,
};
use crate::error::{Error, Result};
use crate::estimator::estimate_initial_step;
use crate::operator::LinearOperator;
use crate::ortho::bcgs2_partial_cholqr;
use crate::sparse::SparseMatrix;

/// New Hessenberg columns for a block seeded at basis vector `i` (1-based).
///
/// With `A V[:, ..p] = V B̲` and `V = [Q_prev | Q_new] R̂`, the block satisfies
/// `A Q[:, i-1..i-1+p] Ř = Q (R̂ B̲ − [H R̂_top; 0])`, where `Ř` is the
/// `p x p` triangle of `R̂` on rows `i-1..i-1+p` and `R̂_top` its first
/// `i - 1` rows. `h_cols` holds the `i - 1` existing columns; column `c` of the
/// result has `i + c + 1` entries.
pub fn assemble_hessenberg(
    h_cols: &[Vec<f64>],
    r_hat: &DenseMatrix,
    b_under: &DenseMatrix,
) -> Result<Vec<Vec<f64>>> {
    let p = b_under.cols();
    if b_under.rows() != p + 1 || r_hat.cols() != p + 1 || r_hat.rows() < p + 1 {
        return Err(Error::DimensionMismatch {
            expected: p + 1,
            got: r_hat.cols(),
        });
    }
    let i = r_hat.rows() - p;
    if h_cols.len() != i - 1 {
        return Err(Error::DimensionMismatch {
            expected: i - 1,
            got: h_cols.len(),
        });
    }

    let mut m = r_hat.matmul(b_under);
    for c in 0..p {
        for r in 0..i {
            let mut acc = 0.0;
            for (t, h) in h_cols.iter().enumerate().skip(r.saturating_sub(1)) {
                acc += h[r] * r_hat[(t, c)];
            }
            m[(r, c)] -= acc;
        }
    }
    let r_check = r_hat.submatrix(i - 1, i - 1 + p, 0, p);
    if !solve_upper_right_in_place(&mut m, &r_check) {
        let col = (0..p).find(|&j| r_check[(j, j)] == 0.0).unwrap_or(0);
        return Err(Error::SingularTriangle { col });
    }
    Ok((0..p).map(|c| m.col(c)[..i + c + 1].to_vec()).collect())
}

struct Fallback {
    column: Vec<f64>,
    q_new: Option<DenseMatrix>,
}

/// One vector orthogonalized by classical Gram-Schmidt twice, used when block
/// orthogonalization keeps nothing. Costs four reductions like a block.
fn fallback_step(
    op: &dyn LinearOperator,
    st: &OrthoState,
    blk: &KrylovBlock,
    basis: &ChangeOfBasis,
    counters: &mut ReductionCounter,
) -> Result<Fallback> {
    let n = op.dim();
    let (v1, b_under) = if blk.s >= 1 {
        (blk.v.col(1).to_vec(), basis.matrix(1))
    } else {
        let mut w = vec![0.0; n];
        op.apply(st.seed(), &mut w)?;
        counters.spmv += 1;
        (w, ChangeOfBasis::monomial(1).matrix(1))
    };
    if v1.iter().any(|v| !v.is_finite()) {
        return Err(Error::FallbackExhausted(
            "basis vector is not finite".into(),
        ));
    }
    let vnorm = norm2(&v1);
    let mut x = DenseMatrix::from_column_major(n, 1, v1);
    let w1 = inner_products(&st.q, &x);
    subtract_product(&mut x, &st.q, &w1);
    let _ = norm2(x.col(0));
    let w2 = inner_products(&st.q, &x);
    subtract_product(&mut x, &st.q, &w2);
    let nrm = norm2(x.col(0));
    counters.projections += 2;
    counters.norms += 2;

    let invariant = nrm == 0.0 || nrm <= n as f64 * f64::EPSILON * vnorm;
    let i = st.q.cols();
    let mut r_hat = DenseMatrix::zeros(i + 1, 2);
    r_hat[(i - 1, 0)] = 1.0;
    for r in 0..i {
        r_hat[(r, 1)] = w1[(r, 0)] + w2[(r, 0)];
    }
    r_hat[(i, 1)] = if invariant { 0.0 } else { nrm };
    let mut cols = assemble_hessenberg(&st.h_cols, &r_hat, &b_under)?;
    let q_new = (!invariant).then(|| {
        x.col_mut(0).iter_mut().for_each(|v| *v /= nrm);
        x
    });
    Ok(Fallback {
        column: cols.pop().expect("one column"),
        q_new,
    })
}

/// Adaptive s-step GMRES.
///
/// Each block generates up to `s` basis vectors with one operator application
/// each, orthogonalizes them with four reductions, and keeps only as many as
/// the partial Cholesky QR accepts; the step size then drops to that count.
/// Near a restart the block is clamped to the remaining budget without
/// lowering the adapted step size.
pub fn adaptive_sstep_gmres(
    a: &SparseMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<SolveTrace> {
    let prep = prepare(a, b, x0, cfg)?;
    let op = prep.op();
    let n = op.dim();
    let mut counters = prep.counters;
    let mut x = prep.x0.clone();

    let mut r = op.residual(&prep.b, &x)?;
    counters.spmv += 1;
    counters.true_residual_checks += 1;
    let beta0 = norm2(&r);
    let mut beta = beta0;
    let target = cfg.rel_tol * beta0;

    let mut s0 = cfg.s0.min(n.saturating_sub(1).max(1));
    let mut ritz = None;
    let mut estimator = None;
    if cfg.basis.needs_ritz() && beta0 > 0.0 {
        let set = ritz_harvest(&op, &r, cfg.s0.min(n), &mut counters)?;
        if set.len() < cfg.s0 {
            log::info!(
                "Arnoldi produced {} Ritz values for s0 = {}; shifts will repeat",
                set.len(),
                cfg.s0
            );
        }
        if cfg.use_estimator && cfg.basis == BasisKind::ScaledNewton {
            let rep = estimate_initial_step(&set, cfg.omega_est, cfg.eps_model)?;
            s0 = s0.min(rep.s0_star);
            estimator = Some(rep);
        }
        ritz = Some(set);
    }
    let ritz_count = ritz.as_ref().map_or(0, |r| r.len());

    let mut s_cur = s0;
    let mut rows = Vec::new();
    let mut blocks = Vec::new();
    let mut per_cycle = Vec::new();
    let mut converged = beta0 == 0.0;
    let mut breakdown = false;
    let mut cycles = 0;
    let mut iter = 0;
    let mut wasted = 0;

    while !converged && cycles < cfg.max_restarts {
        cycles += 1;
        let mut st = OrthoState::new(&r, beta, s_cur, cfg.loo);
        let mut hit = false;
        let mut invariant = false;
        let mut cycle_blocks = 0;
        while st.k() < cfg.restart {
            let k = st.k();
            let s_req = s_cur.min(cfg.restart - k).min(n.saturating_sub(k + 1));
            if s_req == 0 {
                break;
            }
            let basis = ChangeOfBasis::for_kind(cfg.basis, ritz.as_ref(), s_req)?;
            let blk = matrix_powers_kernel(&op, st.seed(), s_req, &basis)?;
            counters.spmv += blk.s as u64;

            let outcome = if blk.s == 0 {
                Err(Error::BlockBreakdown)
            } else {
                bcgs2_partial_cholqr(&st.q, &blk.v, cfg.omega, cfg.monitor)
            };
            let (cols, mut record) = match outcome {
                Ok(o) => {
                    counters += o.reductions;
                    wasted += blk.s - o.p;
                    if o.p < s_req {
                        s_cur = o.p;
                    }
                    let cols = assemble_hessenberg(&st.h_cols, &o.r_hat, &basis.matrix(o.p))?;
                    st.append_basis(&o.q_new);
                    let record = BlockRecord {
                        cycle: cycles,
                        first_iter: iter + 1,
                        requested: s_req,
                        p1: o.p1,
                        p: o.p,
                        accepted: 0,
                        fallback: false,
                        kappa_first: o.kappa_first,
                        kappa_second: o.kappa_second,
                        arnoldi_residual: None,
                    };
                    (cols, record)
                }
                Err(Error::BlockBreakdown) => {
                    log::warn!(
                        "block at iteration {} broke down; taking one Gram-Schmidt step",
                        iter + 1
                    );
                    let fb = fallback_step(&op, &st, &blk, &basis, &mut counters)?;
                    wasted += blk.s.saturating_sub(1);
                    s_cur = 1;
                    match &fb.q_new {
                        Some(q) => st.append_basis(q),
                        None => invariant = true,
                    }
                    let record = BlockRecord {
                        cycle: cycles,
                        first_iter: iter + 1,
                        requested: s_req,
                        p1: 0,
                        p: 1,
                        accepted: 0,
                        fallback: true,
                        kappa_first: Vec::new(),
                        kappa_second: Vec::new(),
                        arnoldi_residual: None,
                    };
                    (vec![fb.column], record)
                }
                Err(e) => return Err(e),
            };
            cycle_blocks += 1;

            let p = record.p;
            for col in cols {
                let res = st.push_h_column(col);
                record.accepted += 1;
                iter += 1;
                rows.push(TraceRow {
                    iter,
                    rel_res: res / beta0,
                    loo: st.loo_at(st.k()),
                    block_size: p,
                    reductions_cum: counters.solve_reductions(),
                    spmv_cum: counters.spmv,
                });
                if res <= target {
                    hit = true;
                    break;
                }
            }
            wasted += p - record.accepted;
            if cfg.verify_arnoldi {
                record.arnoldi_residual = Some(st.arnoldi_residual(&op)?);
            }
            blocks.push(record);
            if hit || invariant {
                break;
            }
        }
        per_cycle.push(cycle_blocks);
        st.update_solution(&mut x, st.k());
        r = op.residual(&prep.b, &x)?;
        counters.spmv += 1;
        counters.true_residual_checks += 1;
        beta = norm2(&r);
        if beta <= target || (hit && beta <= 10.0 * target) {
            converged = true;
        } else if invariant {
            log::warn!(
                "Krylov space became invariant but the residual {:e} did not converge",
                beta / beta0
            );
            breakdown = true;
            break;
        } else if hit {
            log::info!(
                "residual estimate not confirmed ({:e} true); continuing",
                beta / beta0
            );
        }
    }

    let x_out = prep.eq.unscale_solution(&x);
    let final_unprec = unpreconditioned_ratio(a, b, x0, &x_out)?;
    Ok(SolveTrace {
        solver: SolverKind::Adaptive,
        rows,
        blocks,
        x: x_out,
        converged,
        breakdown,
        cycles,
        counters,
        iterations_per_cycle: per_cycle,
        initial_residual: beta0,
        final_rel_residual: if beta0 > 0.0 { beta / beta0 } else { 0.0 },
        final_rel_residual_unpreconditioned: final_unprec,
        s0_used: s0,
        estimator,
        ritz_count,
        equilibration_alpha: prep.alpha,
        wasted_columns: wasted,
    })
}
