//! `sgmres`: run baseline and adaptive s-step GMRES on a test problem and
//! write per-iteration traces.
//!
//! Exit status is 0 when the solve converged or used up its iteration budget,
//! 2 when it stopped on a numerical breakdown, and 1 on bad usage.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sgmres::basis::BasisKind;
use sgmres::harness::{run_experiment, RhsKind, RunManifest, SolverChoice};
use sgmres::solver::{PrecondKind, SolverConfig};
use sgmres::sparse::EquilibrationMode;
use sgmres::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn on(self) -> bool {
        matches!(self, Switch::On)
    }
}

#[derive(Debug, Parser)]
#[command(name = "sgmres", version, about = "Adaptive s-step GMRES experiments")]
struct Args {
    /// Matrix Market file, or one of diag:n:min:max, lap2d:n, lap3d:n.
    #[arg(long)]
    matrix: String,

    #[arg(long, default_value = "both", value_parser = ["gmres", "adaptive", "both"])]
    solver: String,

    #[arg(long, default_value = "monomial", value_parser = ["monomial", "newton", "scaled-newton"])]
    basis: String,

    /// Initial step size.
    #[arg(long, default_value_t = 10)]
    s0: usize,

    /// Condition bound for partial Cholesky QR.
    #[arg(long, default_value_t = 1e7)]
    omega: f64,

    /// Threshold of the initial step-size estimator.
    #[arg(long)]
    omega_est: Option<f64>,

    #[arg(long, value_enum, default_value = "off")]
    estimator: Switch,

    /// Restart length.
    #[arg(long, default_value_t = 100)]
    restart: usize,

    /// Number of restart cycles.
    #[arg(long, default_value_t = 1)]
    max_restarts: usize,

    #[arg(long, default_value_t = 1e-10)]
    tol: f64,

    #[arg(long, default_value = "none", value_parser = ["none", "ilu0"])]
    precond: String,

    #[arg(long, default_value = "none", value_parser = ["none", "scalar", "column"])]
    equilibrate: String,

    /// Record loss of orthogonality per iteration.
    #[arg(long, value_enum, default_value = "on")]
    loo: Switch,

    /// Right-hand side.
    #[arg(long, default_value = "random", value_parser = ["random", "ones", "a-ones"])]
    rhs: String,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn manifest(args: Args) -> sgmres::Result<RunManifest> {
    let defaults = SolverConfig::default();
    let config = SolverConfig {
        basis: args.basis.parse::<BasisKind>()?,
        s0: args.s0,
        omega: args.omega,
        omega_est: args.omega_est.unwrap_or(defaults.omega_est),
        use_estimator: args.estimator.on(),
        restart: args.restart,
        max_restarts: args.max_restarts,
        rel_tol: args.tol,
        precond: args.precond.parse::<PrecondKind>()?,
        equilibrate: args.equilibrate.parse::<EquilibrationMode>()?,
        loo: args.loo.on(),
        ..defaults
    };
    config.validate()?;
    Ok(RunManifest {
        problem: args.matrix,
        solver: args.solver.parse::<SolverChoice>()?,
        config,
        rhs: args.rhs.parse::<RhsKind>()?,
        seed: args.seed,
        out: args.out,
    })
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::FallbackExhausted(_) | Error::BlockBreakdown | Error::CholeskyBreakdown { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();

    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let manifest = match manifest(args) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run_experiment(&manifest) {
        Ok(out) => {
            for s in &out.summaries {
                println!(
                    "{}: {} iterations in {} cycles, converged={}, rel_res={:e}, blocks={:?}",
                    s.solver,
                    s.iterations,
                    s.cycles,
                    s.converged,
                    s.final_rel_residual,
                    s.block_sizes
                );
            }
            if let Some(c) = &out.comparison {
                println!(
                    "max log10 residual gap {:.3}, reductions {} vs {}",
                    c.max_log10_gap, c.reductions_a, c.reductions_b
                );
            }
            if out.summaries.iter().any(|s| s.breakdown) {
                eprintln!("error: solve stopped on a numerical breakdown");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
