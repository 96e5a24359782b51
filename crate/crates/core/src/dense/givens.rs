//! Givens rotations and the incrementally factored Hessenberg least-squares
//! problem `min ‖βe₁ − Hy‖`.

use super::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation {
    pub c: f64,
    pub s: f64,
}

impl GivensRotation {
    pub const IDENTITY: Self = Self { c: 1.0, s: 0.0 };

    /// Rotation mapping `(a, b)` to `(r, 0)`; also returns `r >= 0`.
    pub fn annihilate(a: f64, b: f64) -> (Self, f64) {
        let r = a.hypot(b);
        if r == 0.0 {
            return (Self::IDENTITY, 0.0);
        }
        (Self { c: a / r, s: b / r }, r)
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.c * x + self.s * y, -self.s * x + self.c * y)
    }
}

/// Rotated Hessenberg columns plus the rotated right-hand side.
#[derive(Debug, Clone)]
pub struct GivensLeastSquares {
    rotations: Vec<GivensRotation>,
    /// Column `k` holds rows `0..=k` of the triangular factor.
    r_cols: Vec<Vec<f64>>,
    g: Vec<f64>,
}

impl GivensLeastSquares {
    pub fn new(beta: f64) -> Self {
        Self {
            rotations: Vec::new(),
            r_cols: Vec::new(),
            g: vec![beta],
        }
    }

    /// Number of columns absorbed.
    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn rotations(&self) -> &[GivensRotation] {
        &self.rotations
    }

    /// Absorb the next Hessenberg column (`k + 2` entries for column `k`) and
    /// return the new residual estimate.
    pub fn push_column(&mut self, column: &[f64]) -> f64 {
        let k = self.len();
        assert_eq!(
            column.len(),
            k + 2,
            "Hessenberg column {k} must have {} rows",
            k + 2
        );
        let mut h = column.to_vec();
        for (i, rot) in self.rotations.iter().enumerate() {
            let (a, b) = rot.apply(h[i], h[i + 1]);
            h[i] = a;
            h[i + 1] = b;
        }
        let (rot, r) = GivensRotation::annihilate(h[k], h[k + 1]);
        h[k] = r;
        h.truncate(k + 1);
        let (gk, gk1) = rot.apply(self.g[k], 0.0);
        self.g[k] = gk;
        self.g.push(gk1);
        self.rotations.push(rot);
        self.r_cols.push(h);
        gk1.abs()
    }

    /// Residual estimate after the first `k` columns.
    pub fn residual_at(&self, k: usize) -> f64 {
        self.g[k].abs()
    }

    pub fn residual(&self) -> f64 {
        self.residual_at(self.len())
    }

    /// Least-squares coefficients using the first `k` columns. A diagonal entry
    /// at roundoff level relative to the factor (a singular Hessenberg matrix,
    /// as when the operator is singular on an invariant subspace) yields a zero
    /// coefficient for that column instead of an enormous one.
    pub fn solve(&self, k: usize) -> Vec<f64> {
        let scale = self.r_cols[..k]
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = k as f64 * f64::EPSILON * scale;
        let mut y = self.g[..k].to_vec();
        for j in (0..k).rev() {
            let d = self.r_cols[j][j];
            let yj = if d.abs() <= tiny { 0.0 } else { y[j] / d };
            y[j] = yj;
            for (yi, rij) in y.iter_mut().zip(&self.r_cols[j]).take(j) {
                *yi -= rij * yj;
            }
        }
        y
    }

    /// The triangular factor of the first `k` columns, for inspection.
    pub fn triangular(&self, k: usize) -> DenseMatrix {
        DenseMatrix::from_fn(k, k, |i, j| if i <= j { self.r_cols[j][i] } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_rotations() {
        let (rot, r) = GivensRotation::annihilate(1.0, 0.0);
        assert_eq!(rot, GivensRotation::IDENTITY);
        assert_eq!(r, 1.0);
        let (rot, r) = GivensRotation::annihilate(0.0, 1.0);
        assert_eq!((rot.c, rot.s, r), (0.0, 1.0, 1.0));
        let (rot, r) = GivensRotation::annihilate(0.0, 0.0);
        assert_eq!((rot, r), (GivensRotation::IDENTITY, 0.0));
    }

    #[test]
    fn first_column_without_subdiagonal_keeps_no_residual() {
        let mut ls = GivensLeastSquares::new(2.0);
        assert_eq!(ls.push_column(&[1.0, 0.0]), 0.0);
        assert_eq!(ls.solve(1), vec![2.0]);
    }

    #[test]
    fn matches_normal_equations() {
        // H is 3x2
        let h = [[2.0, 1.0], [1.0, 3.0], [0.0, 0.5]];
        let mut ls = GivensLeastSquares::new(1.0);
        ls.push_column(&[h[0][0], h[1][0]]);
        let res = ls.push_column(&[h[0][1], h[1][1], h[2][1]]);
        let y = ls.solve(2);
        let r: Vec<f64> = (0..3)
            .map(|i| if i == 0 { 1.0 } else { 0.0 } - h[i][0] * y[0] - h[i][1] * y[1])
            .collect();
        let direct = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((direct - res).abs() < 1e-14);
        // residual orthogonal to columns of H
        for j in 0..2 {
            let d: f64 = (0..3).map(|i| h[i][j] * r[i]).sum();
            assert!(d.abs() < 1e-14);
        }
    }

    #[test]
    fn roundoff_pivot_is_treated_as_zero() {
        // H = [[1, 1], [1, 1 + 1e-17], [0, 0]]: rank one up to roundoff.
        let mut ls = GivensLeastSquares::new(1.0);
        ls.push_column(&[1.0, 1.0]);
        ls.push_column(&[1.0, 1.0 + 1e-17, 0.0]);
        let y = ls.solve(2);
        assert!(y.iter().all(|v| v.abs() < 10.0), "{y:?}");
        let r0 = 1.0 - (y[0] + y[1]);
        let r1 = -(y[0] + y[1]);
        assert!((r0 * r0 + r1 * r1).sqrt() <= 0.5f64.sqrt() + 1e-12);
    }
}
