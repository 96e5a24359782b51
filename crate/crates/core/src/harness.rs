//! Experiment driver: builds a problem, runs the solvers and writes traces.
//!
//! Each solver run produces `<solver>.csv` with one row per accepted
//! iteration and a `<solver>.json` summary; the estimator report, when there
//! is one, goes to `estimator.csv`, and paired runs add `comparison.json`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counters::ReductionCounter;
use crate::error::{Error, Result};
use crate::estimator::EstimatorReport;
use crate::solver::{adaptive_sstep_gmres, gmres_baseline, SolveTrace, SolverConfig, SolverKind};
use crate::sparse::{ProblemSpec, SparseMatrix};

pub const CSV_HEADER: &str = "iter,rel_res,loo,block_size,reductions_cum,spmv_cum";
pub const ESTIMATOR_HEADER: &str = "estimator_col,E_norm,E_lower_norm";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsKind {
    /// Entries uniform in `[-1, 1)` from the seeded generator.
    #[default]
    Random,
    Ones,
    /// `b = A·1`, so the solution is known.
    AOnes,
}

impl std::str::FromStr for RhsKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Self::Random),
            "ones" => Ok(Self::Ones),
            "a-ones" => Ok(Self::AOnes),
            other => Err(Error::param(
                "rhs",
                format!("expected random, ones or a-ones, got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    Gmres,
    #[default]
    Adaptive,
    Both,
}

impl std::str::FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gmres" => Ok(Self::Gmres),
            "adaptive" => Ok(Self::Adaptive),
            "both" => Ok(Self::Both),
            other => Err(Error::param(
                "solver",
                format!("expected gmres, adaptive or both, got {other:?}"),
            )),
        }
    }
}

pub fn make_rhs(a: &SparseMatrix, kind: RhsKind, seed: u64) -> Result<Vec<f64>> {
    let n = a.n();
    Ok(match kind {
        RhsKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
        }
        RhsKind::Ones => vec![1.0; n],
        RhsKind::AOnes => a.spmv(&vec![1.0; n])?,
    })
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// `diag:n:min:max`, `lap2d:n`, `lap3d:n` or a Matrix Market path.
    pub problem: String,
    pub solver: SolverChoice,
    pub config: SolverConfig,
    pub rhs: RhsKind,
    pub seed: u64,
    pub out: PathBuf,
}

/// Contents of the JSON sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub solver: SolverKind,
    pub problem: String,
    pub n: usize,
    pub nnz: usize,
    pub converged: bool,
    pub breakdown: bool,
    pub iterations: usize,
    pub cycles: usize,
    pub s0_star: Option<usize>,
    pub s0_used: usize,
    /// Step size kept by each block.
    pub block_sizes: Vec<usize>,
    /// Columns of each block used by the solution; sums to `iterations`.
    pub accepted_per_block: Vec<usize>,
    pub iterations_per_cycle: Vec<usize>,
    pub wasted_columns: usize,
    pub ritz_count: usize,
    pub equilibration_alpha: Option<f64>,
    pub final_rel_residual: f64,
    pub final_rel_residual_unpreconditioned: f64,
    pub final_loo: Option<f64>,
    pub counters: ReductionCounter,
    pub ortho_reductions: u64,
    pub wall_time_s: f64,
    pub seed: u64,
    pub rhs: RhsKind,
    pub config: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub common_iterations: usize,
    /// Largest `|log₁₀ a − log₁₀ b|` over common iterations above the floor.
    pub max_log10_gap: f64,
    /// First iteration where the gap exceeds one decade.
    pub first_divergence: Option<usize>,
    pub reductions_a: u64,
    pub reductions_b: u64,
    /// `reductions_a / reductions_b` (orthogonalization only).
    pub reduction_ratio: f64,
}

/// Compare the residual histories of two runs on the same problem. Iterations
/// where either residual is at or below `floor` are ignored.
pub fn compare_runs(a: &SolveTrace, b: &SolveTrace, floor: f64) -> Result<DivergenceReport> {
    let scale = a.initial_residual.abs().max(b.initial_residual.abs());
    if (a.initial_residual - b.initial_residual).abs() > 1e-12 * scale {
        return Err(Error::TraceMismatch(format!(
            "initial residuals differ: {:e} vs {:e}",
            a.initial_residual, b.initial_residual
        )));
    }
    let common = a.rows.len().min(b.rows.len());
    let mut max_gap = 0.0f64;
    let mut first = None;
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        if ra.rel_res <= floor || rb.rel_res <= floor {
            break;
        }
        let gap = (ra.rel_res.log10() - rb.rel_res.log10()).abs();
        if gap > 1.0 && first.is_none() {
            first = Some(ra.iter);
        }
        max_gap = max_gap.max(gap);
    }
    let ra = a.counters.ortho_reductions();
    let rb = b.counters.ortho_reductions();
    Ok(DivergenceReport {
        common_iterations: common,
        max_log10_gap: max_gap,
        first_divergence: first,
        reductions_a: ra,
        reductions_b: rb,
        reduction_ratio: ra as f64 / rb as f64,
    })
}

pub fn trace_csv(trace: &SolveTrace) -> String {
    let mut s = String::with_capacity(64 * (trace.rows.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in &trace.rows {
        let loo = r.loo.map(|v| format!("{v:e}")).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{:e},{},{},{},{}",
            r.iter, r.rel_res, loo, r.block_size, r.reductions_cum, r.spmv_cum
        );
    }
    s
}

pub fn estimator_csv(rep: &EstimatorReport) -> String {
    let mut s = String::from(ESTIMATOR_HEADER);
    s.push('\n');
    for (j, (e, l)) in rep.col_norms.iter().zip(&rep.col_norms_lower).enumerate() {
        let _ = writeln!(s, "{},{e:e},{l:e}", j + 1);
    }
    s
}

fn summarize(m: &RunManifest, a: &SparseMatrix, t: &SolveTrace, wall: f64) -> RunSummary {
    RunSummary {
        solver: t.solver,
        problem: m.problem.clone(),
        n: a.n(),
        nnz: a.nnz(),
        converged: t.converged,
        breakdown: t.breakdown,
        iterations: t.rows.len(),
        cycles: t.cycles,
        s0_star: t.estimator.as_ref().map(|e| e.s0_star),
        s0_used: t.s0_used,
        block_sizes: t.block_sizes(),
        accepted_per_block: t.blocks.iter().map(|b| b.accepted).collect(),
        iterations_per_cycle: t.iterations_per_cycle.clone(),
        wasted_columns: t.wasted_columns,
        ritz_count: t.ritz_count,
        equilibration_alpha: t.equilibration_alpha,
        final_rel_residual: t.final_rel_residual,
        final_rel_residual_unpreconditioned: t.final_rel_residual_unpreconditioned,
        final_loo: t.final_loo(),
        counters: t.counters,
        ortho_reductions: t.counters.ortho_reductions(),
        wall_time_s: wall,
        seed: m.seed,
        rhs: m.rhs,
        config: m.config.clone(),
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub traces: Vec<SolveTrace>,
    pub summaries: Vec<RunSummary>,
    pub comparison: Option<DivergenceReport>,
    pub files: Vec<PathBuf>,
}

fn write(path: PathBuf, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents)?;
    files.push(path);
    Ok(())
}

/// Run the solvers named in the manifest and write their traces under
/// `manifest.out`.
pub fn run_experiment(manifest: &RunManifest) -> Result<RunOutput> {
    manifest.config.validate()?;
    let spec: ProblemSpec = manifest.problem.parse()?;
    let a = spec.build()?;
    run_on_matrix(manifest, &a)
}

/// [`run_experiment`] with the matrix already built.
pub fn run_on_matrix(manifest: &RunManifest, a: &SparseMatrix) -> Result<RunOutput> {
    manifest.config.validate()?;
    let b = make_rhs(a, manifest.rhs, manifest.seed)?;
    let out: &Path = &manifest.out;
    fs::create_dir_all(out)?;

    let kinds: &[SolverKind] = match manifest.solver {
        SolverChoice::Gmres => &[SolverKind::Gmres],
        SolverChoice::Adaptive => &[SolverKind::Adaptive],
        SolverChoice::Both => &[SolverKind::Gmres, SolverKind::Adaptive],
    };
    let mut traces = Vec::new();
    let mut summaries = Vec::new();
    let mut files = Vec::new();
    for &kind in kinds {
        let start = Instant::now();
        let trace = match kind {
            SolverKind::Gmres => gmres_baseline(a, &b, None, &manifest.config)?,
            SolverKind::Adaptive => adaptive_sstep_gmres(a, &b, None, &manifest.config)?,
        };
        let wall = start.elapsed().as_secs_f64();
        let summary = summarize(manifest, a, &trace, wall);
        log::info!(
            "{kind}: {} iterations, converged {}, final residual {:e}",
            summary.iterations,
            summary.converged,
            summary.final_rel_residual
        );
        write(
            out.join(format!("{kind}.csv")),
            &trace_csv(&trace),
            &mut files,
        )?;
        write(
            out.join(format!("{kind}.json")),
            &serde_json::to_string_pretty(&summary)?,
            &mut files,
        )?;
        if let Some(rep) = &trace.estimator {
            write(out.join("estimator.csv"), &estimator_csv(rep), &mut files)?;
        }
        traces.push(trace);
        summaries.push(summary);
    }
    let comparison = if traces.len() == 2 {
        let c = compare_runs(&traces[0], &traces[1], manifest.config.rel_tol)?;
        write(
            out.join("comparison.json"),
            &serde_json::to_string_pretty(&c)?,
            &mut files,
        )?;
        Some(c)
    } else {
        None
    };
    Ok(RunOutput {
        traces,
        summaries,
        comparison,
        files,
    })
}
