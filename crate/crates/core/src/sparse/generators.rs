//! Synthetic test operators.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{read_matrix_market, SparseMatrix};
use crate::error::{Error, Result};

/// Diagonal matrix with `n` evenly spaced eigenvalues, both endpoints included.
pub fn gen_diagonal(n: usize, lambda_min: f64, lambda_max: f64) -> Result<SparseMatrix> {
    if n < 2 {
        return Err(Error::param("n", "diagonal generator needs n >= 2"));
    }
    if !(lambda_min < lambda_max) {
        return Err(Error::param("lambda", "need lambda_min < lambda_max"));
    }
    let step = (lambda_max - lambda_min) / (n - 1) as f64;
    let diag: Vec<f64> = (0..n).map(|i| lambda_min + i as f64 * step).collect();
    Ok(SparseMatrix::from_diagonal(&diag))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplaceDims {
    /// `n x n` grid, 5-point stencil.
    Two(usize),
    /// `n x n x n` grid, 7-point stencil.
    Three(usize),
}

/// Finite-difference Laplacian on a uniform grid with Dirichlet truncation and
/// lexicographic ordering (x fastest).
pub fn gen_laplace(dims: LaplaceDims) -> Result<SparseMatrix> {
    let (n, d) = match dims {
        LaplaceDims::Two(n) => (n, 2usize),
        LaplaceDims::Three(n) => (n, 3usize),
    };
    if n < 2 {
        return Err(Error::param("n", "Laplace generator needs n >= 2"));
    }
    let nz = if d == 3 { n } else { 1 };
    let size = n * n * nz;
    let diag = 2.0 * d as f64;

    let mut row_ptr = Vec::with_capacity(size + 1);
    let mut col_idx = Vec::with_capacity(size * (2 * d + 1));
    let mut values = Vec::with_capacity(size * (2 * d + 1));
    row_ptr.push(0);
    let plane = n * n;
    for k in 0..nz {
        for j in 0..n {
            for i in 0..n {
                let row = k * plane + j * n + i;
                // neighbours in increasing column order
                if d == 3 && k > 0 {
                    col_idx.push(row - plane);
                    values.push(-1.0);
                }
                if j > 0 {
                    col_idx.push(row - n);
                    values.push(-1.0);
                }
                if i > 0 {
                    col_idx.push(row - 1);
                    values.push(-1.0);
                }
                col_idx.push(row);
                values.push(diag);
                if i + 1 < n {
                    col_idx.push(row + 1);
                    values.push(-1.0);
                }
                if j + 1 < n {
                    col_idx.push(row + n);
                    values.push(-1.0);
                }
                if d == 3 && k + 1 < nz {
                    col_idx.push(row + plane);
                    values.push(-1.0);
                }
                row_ptr.push(col_idx.len());
            }
        }
    }
    SparseMatrix::try_from_csr(size, row_ptr, col_idx, values)
}

/// Where the operator of an experiment comes from.
///
/// Parsed from `diag:n:min:max`, `lap2d:n`, `lap3d:n`, or otherwise treated as
/// a path to a Matrix Market file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ProblemSpec {
    Diagonal { n: usize, min: f64, max: f64 },
    Laplace2d { n: usize },
    Laplace3d { n: usize },
    File(PathBuf),
}

impl ProblemSpec {
    pub fn build(&self) -> Result<SparseMatrix> {
        match self {
            ProblemSpec::Diagonal { n, min, max } => gen_diagonal(*n, *min, *max),
            ProblemSpec::Laplace2d { n } => gen_laplace(LaplaceDims::Two(*n)),
            ProblemSpec::Laplace3d { n } => gen_laplace(LaplaceDims::Three(*n)),
            ProblemSpec::File(p) => read_matrix_market(p),
        }
    }
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::ProblemSpec(s.to_string());
        let int = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let real = |t: &str| t.parse::<f64>().map_err(|_| bad());
        match parts[0] {
            "diag" if parts.len() == 4 => Ok(ProblemSpec::Diagonal {
                n: int(parts[1])?,
                min: real(parts[2])?,
                max: real(parts[3])?,
            }),
            "lap2d" if parts.len() == 2 => Ok(ProblemSpec::Laplace2d { n: int(parts[1])? }),
            "lap3d" if parts.len() == 2 => Ok(ProblemSpec::Laplace3d { n: int(parts[1])? }),
            "diag" | "lap2d" | "lap3d" => Err(bad()),
            _ => Ok(ProblemSpec::File(PathBuf::from(s))),
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::Diagonal { n, min, max } => write!(f, "diag:{n}:{min}:{max}"),
            ProblemSpec::Laplace2d { n } => write!(f, "lap2d:{n}"),
            ProblemSpec::Laplace3d { n } => write!(f, "lap3d:{n}"),
            ProblemSpec::File(p) => write!(f, "{}", p.display()),
        }
    }
}
