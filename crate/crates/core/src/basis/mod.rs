//! Polynomial bases for the Krylov block: Ritz shifts, the change-of-basis
//! matrix and the matrix powers kernel.

mod change_of_basis;
mod leja;
mod mpk;

pub use change_of_basis::{scaling_coefficients, ChangeOfBasis};
pub use leja::RitzSet;
pub use mpk::{matrix_powers_kernel, KrylovBlock, OVERFLOW_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    #[default]
    Monomial,
    Newton,
    ScaledNewton,
}

impl BasisKind {
    /// Whether the basis needs Ritz values as shifts.
    pub fn needs_ritz(self) -> bool {
        !matches!(self, Self::Monomial)
    }
}

impl std::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "monomial" => Ok(Self::Monomial),
            "newton" => Ok(Self::Newton),
            "scaled-newton" | "scaled_newton" => Ok(Self::ScaledNewton),
            other => Err(Error::param(
                "basis",
                format!("expected monomial, newton or scaled-newton, got {other:?}"),
            )),
        }
    }
}

impl std::fmt::Display for BasisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Monomial => "monomial",
            Self::Newton => "newton",
            Self::ScaledNewton => "scaled-newton",
        })
    }
}

/// Smallest admissible `|θ̄ − θ|` relative to the largest Ritz magnitude.
pub(crate) fn gamma_floor(max_abs: f64) -> f64 {
    if max_abs > 0.0 {
        f64::EPSILON * max_abs
    } else {
        f64::EPSILON
    }
}
