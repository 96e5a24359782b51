use super::{gamma_floor, BasisKind, RitzSet};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Per-shift scaling `γᵢ`: ones for the plain Newton (and monomial) basis,
/// `|θ̄ − θᵢ|` for scaled Newton, floored at `ε·max|θ|`.
pub fn scaling_coefficients(ritz: &RitzSet, kind: BasisKind) -> Vec<f64> {
    if kind != BasisKind::ScaledNewton {
        return vec![1.0; ritz.len()];
    }
    let mean = ritz.mean_real();
    let floor = gamma_floor(ritz.max_abs());
    let mut floored = 0;
    let gammas: Vec<f64> = ritz
        .values()
        .iter()
        .map(|z| {
            let g = (z - mean).norm();
            if g < floor {
                floored += 1;
                floor
            } else {
                g
            }
        })
        .collect();
    if floored == gammas.len() {
        log::warn!("every Ritz value coincides with the mean; all scalings floored to {floor:e}");
    } else if floored > 0 {
        log::debug!("{floored} scaling coefficients floored to {floor:e}");
    }
    gammas
}

/// Recurrence coefficients of the basis polynomials, so that
/// `A·V[:, ..s] = V·B̲` with the `(s+1) x s` matrix [`ChangeOfBasis::matrix`].
///
/// Step `k` computes `v_{k+1} = ((A − θ_k)v_k − β_k v_{k−1}) / γ_k`, where
/// `β_k` is nonzero only for the second member of a conjugate pair
/// `a ± bi` placed at `(k−1, k)`: then `θ_{k−1} = θ_k = a` and
/// `β_k = −b²/γ_{k−1}`, which keeps the arithmetic real.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeOfBasis {
    kind: BasisKind,
    diag: Vec<f64>,
    subdiag: Vec<f64>,
    pair_coupling: Vec<f64>,
}

impl ChangeOfBasis {
    pub fn monomial(s: usize) -> Self {
        Self {
            kind: BasisKind::Monomial,
            diag: vec![0.0; s],
            subdiag: vec![1.0; s],
            pair_coupling: vec![0.0; s],
        }
    }

    /// Build from Leja-ordered shifts and their scalings. Uses the first `s`
    /// shifts; monomial ignores both.
    pub fn build(ritz: &RitzSet, gammas: &[f64], kind: BasisKind, s: usize) -> Result<Self> {
        if kind == BasisKind::Monomial {
            return Ok(Self::monomial(s));
        }
        if ritz.len() < s || gammas.len() < s {
            return Err(Error::NotEnoughRitzValues {
                needed: s,
                have: ritz.len().min(gammas.len()),
            });
        }
        if let Some(g) = gammas[..s].iter().find(|g| !(**g > 0.0) || !g.is_finite()) {
            return Err(Error::param(
                "gamma",
                format!("scalings must be positive, got {g}"),
            ));
        }
        let theta = &ritz.values()[..s];
        let diag = theta.iter().map(|z| z.re).collect();
        let mut pair_coupling = vec![0.0; s];
        for k in 1..s {
            let prev = theta[k - 1];
            if prev.im > 0.0 && theta[k] == prev.conj() {
                pair_coupling[k] = -(prev.im * prev.im) / gammas[k - 1];
            }
        }
        Ok(Self {
            kind,
            diag,
            subdiag: gammas[..s].to_vec(),
            pair_coupling,
        })
    }

    /// Shifts, scalings and pair couplings for `kind`, harvesting the scalings
    /// from `ritz` and cycling the shifts if there are fewer than `s`.
    pub fn for_kind(kind: BasisKind, ritz: Option<&RitzSet>, s: usize) -> Result<Self> {
        if kind == BasisKind::Monomial {
            return Ok(Self::monomial(s));
        }
        let ritz = ritz.ok_or(Error::NotEnoughRitzValues { needed: s, have: 0 })?;
        let gammas = scaling_coefficients(ritz, kind);
        let cycled = ritz.cycled(s);
        let gammas: Vec<f64> = (0..cycled.len())
            .map(|k| gammas[k % gammas.len()])
            .collect();
        Self::build(&cycled, &gammas, kind, s)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn s(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn subdiag(&self) -> &[f64] {
        &self.subdiag
    }

    /// `β_k`, the entry of B̲ at `(k−1, k)`.
    pub fn pair_coupling(&self) -> &[f64] {
        &self.pair_coupling
    }

    /// The `(p+1) x p` leading part of B̲ for `p <= s`.
    pub fn matrix(&self, p: usize) -> DenseMatrix {
        assert!(
            p <= self.s(),
            "requested {p} columns of a {}-step basis",
            self.s()
        );
        DenseMatrix::from_fn(p + 1, p, |i, j| {
            if i == j {
                self.diag[j]
            } else if i == j + 1 {
                self.subdiag[j]
            } else if i + 1 == j {
                self.pair_coupling[j]
            } else {
                0.0
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ritz(v: &[f64]) -> RitzSet {
        let z: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        RitzSet::leja_order(&z).unwrap()
    }

    #[test]
    fn gammas_from_mean() {
        assert_eq!(
            scaling_coefficients(&ritz(&[1.0, 3.0]), BasisKind::ScaledNewton),
            vec![1.0, 1.0]
        );
        // Leja order of {0, 0, 6} is (6, 0, 0)
        assert_eq!(
            scaling_coefficients(&ritz(&[0.0, 0.0, 6.0]), BasisKind::ScaledNewton),
            vec![4.0, 2.0, 2.0]
        );
        assert_eq!(
            scaling_coefficients(&ritz(&[0.5, 7.0, -2.0]), BasisKind::Newton),
            vec![1.0; 3]
        );
    }

    #[test]
    fn degenerate_gammas_are_floored() {
        let g = scaling_coefficients(&ritz(&[2.0, 2.0]), BasisKind::ScaledNewton);
        assert_eq!(g, vec![2.0 * f64::EPSILON; 2]);
    }

    #[test]
    fn monomial_matrix() {
        let b = ChangeOfBasis::monomial(3).matrix(3);
        let want = DenseMatrix::from_rows(&[
            &[0.0, 0.0, 0.0],
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
            &[0.0, 0.0, 1.0],
        ]);
        assert_eq!(b, want);
    }

    #[test]
    fn newton_is_definitional() {
        let r = ritz(&[1.0, 2.0, 3.0]);
        let b = ChangeOfBasis::build(&r, &[1.0; 3], BasisKind::Newton, 3).unwrap();
        assert_eq!(b.diag(), &[3.0, 1.0, 2.0]);
        assert_eq!(b.subdiag(), &[1.0; 3]);
        assert_eq!(b.pair_coupling(), &[0.0; 3]);
    }

    #[test]
    fn pair_coupling_sign() {
        let z = [Complex64::new(1.0, 2.0), Complex64::new(1.0, -2.0)];
        let r = RitzSet::leja_order(&z).unwrap();
        let b = ChangeOfBasis::build(&r, &[0.5, 0.5], BasisKind::Newton, 2).unwrap();
        assert_eq!(b.diag(), &[1.0, 1.0]);
        assert_eq!(b.pair_coupling(), &[0.0, -8.0]);
        assert_eq!(b.matrix(2)[(0, 1)], -8.0);
    }

    #[test]
    fn too_few_shifts() {
        let r = ritz(&[1.0]);
        assert!(matches!(
            ChangeOfBasis::build(&r, &[1.0], BasisKind::Newton, 2),
            Err(Error::NotEnoughRitzValues { needed: 2, have: 1 })
        ));
        let b = ChangeOfBasis::for_kind(BasisKind::Newton, Some(&r), 3).unwrap();
        assert_eq!(b.diag(), &[1.0; 3]);
    }
}
