//! Singular values of small square matrices by one-sided Jacobi rotations.

use super::DenseMatrix;

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let rows = a.rows();
    let n = a.cols();
    let mut u = a.clone();
    let tol = f64::EPSILON * (rows.max(1) as f64);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let cp = u.col(p);
                    let cq = u.col(q);
                    let mut alpha = 0.0;
                    let mut beta = 0.0;
                    let mut gamma = 0.0;
                    for (x, y) in cp.iter().zip(cq) {
                        alpha += x * x;
                        beta += y * y;
                        gamma += x * y;
                    }
                    (alpha, beta, gamma)
                };
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let x = u[(i, p)];
                    let y = u[(i, q)];
                    u[(i, p)] = c * x - s * y;
                    u[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = (0..n).map(|j| super::norm2(u.col(j))).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `σ_max / σ_min`, or `+∞` when the matrix is singular.
pub fn svd_condition(r: &DenseMatrix) -> f64 {
    let sv = singular_values(r);
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => max / min,
        _ => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(svd_condition(&DenseMatrix::identity(3)), 1.0);
        let d = DenseMatrix::from_rows(&[&[10.0, 0.0], &[0.0, 0.1]]);
        assert!((svd_condition(&d) - 100.0).abs() < 1e-12);
        let j = DenseMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let want = (1.0 + 5f64.sqrt()) / (5f64.sqrt() - 1.0);
        assert!((svd_condition(&j) - want).abs() < 1e-13);
        let z = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(svd_condition(&z), f64::INFINITY);
    }

    #[test]
    fn values_are_sorted() {
        let a = DenseMatrix::from_rows(&[&[3.0, 0.0, 0.0], &[0.0, 5.0, 0.0], &[0.0, 0.0, 1.0]]);
        assert_eq!(singular_values(&a), vec![5.0, 3.0, 1.0]);
    }
}
