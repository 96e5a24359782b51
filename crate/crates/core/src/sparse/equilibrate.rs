use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SparseMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibrationMode {
    #[default]
    None,
    /// `A' = A / alpha` with `alpha` the largest Ritz value modulus.
    Scalar,
    /// Unit column 2-norms.
    Column,
}

impl FromStr for EquilibrationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "scalar" => Ok(Self::Scalar),
            "column" => Ok(Self::Column),
            _ => Err(Error::param("equilibrate", format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for EquilibrationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Scalar => "scalar",
            Self::Column => "column",
        })
    }
}

/// Diagonal scalings of `A' = D_r A D_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equilibration {
    pub d_r: Vec<f64>,
    pub d_c: Vec<f64>,
    pub mode: EquilibrationMode,
}

impl Equilibration {
    pub fn identity(n: usize) -> Self {
        Self {
            d_r: vec![1.0; n],
            d_c: vec![1.0; n],
            mode: EquilibrationMode::None,
        }
    }

    /// `D_r b`, the right-hand side of the scaled system.
    pub fn scale_rhs(&self, b: &[f64]) -> Vec<f64> {
        b.iter().zip(&self.d_r).map(|(v, d)| v * d).collect()
    }

    /// `x = D_c x'`, mapping a scaled solution back.
    pub fn unscale_solution(&self, x_scaled: &[f64]) -> Vec<f64> {
        x_scaled.iter().zip(&self.d_c).map(|(v, d)| v * d).collect()
    }

    /// `x' = D_c^{-1} x`, mapping an initial guess into the scaled system.
    pub fn scale_solution(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.d_c).map(|(v, d)| v / d).collect()
    }
}

/// Scale `a` according to `mode`. Scalar mode needs `ritz_radius = max |theta|`.
pub fn equilibrate(
    a: &SparseMatrix,
    mode: EquilibrationMode,
    ritz_radius: Option<f64>,
) -> Result<(SparseMatrix, Equilibration)> {
    let n = a.n();
    match mode {
        EquilibrationMode::None => Ok((a.clone(), Equilibration::identity(n))),
        EquilibrationMode::Scalar => {
            let alpha = ritz_radius
                .ok_or_else(|| Error::param("alpha", "scalar equilibration needs a Ritz radius"))?;
            if !(alpha > 0.0) || !alpha.is_finite() {
                return Err(Error::param(
                    "alpha",
                    format!("must be positive and finite, got {alpha}"),
                ));
            }
            let d = 1.0 / alpha.sqrt();
            let eq = Equilibration {
                d_r: vec![d; n],
                d_c: vec![d; n],
                mode,
            };
            Ok((a.scaled(&eq.d_r, &eq.d_c), eq))
        }
        EquilibrationMode::Column => {
            let norms = a.column_norms();
            let mut d_c = Vec::with_capacity(n);
            for (c, &nrm) in norms.iter().enumerate() {
                if nrm == 0.0 {
                    return Err(Error::ZeroColumn { col: c });
                }
                d_c.push(1.0 / nrm);
            }
            let eq = Equilibration {
                d_r: vec![1.0; n],
                d_c,
                mode,
            };
            Ok((a.scaled(&eq.d_r, &eq.d_c), eq))
        }
    }
}
