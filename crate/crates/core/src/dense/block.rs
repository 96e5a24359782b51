//! Tall-skinny block kernels.
//!
//! Parallelism is over output entries or over row chunks; each individual sum
//! always runs in the same order, so results do not depend on the thread count.

use super::DenseMatrix;
use crate::par;

const ROW_CHUNK: usize = 4096;

/// Dot product with four interleaved partial sums combined in a fixed order.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((acc[0] + acc[1]) + (acc[2] + acc[3])) + tail
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `Qᵀ X` for tall `Q` (`N x i`) and `X` (`N x s`).
pub fn inner_products(q: &DenseMatrix, x: &DenseMatrix) -> DenseMatrix {
    assert_eq!(q.rows(), x.rows(), "inner_products row mismatch");
    let (i, s) = (q.cols(), x.cols());
    let mut data = vec![0.0; i * s];
    par::fill_indexed(&mut data, |idx| {
        let (a, b) = (idx % i, idx / i);
        dot(q.col(a), x.col(b))
    });
    DenseMatrix::from_column_major(i, s, data)
}

/// `Xᵀ X`, exactly symmetric (the upper triangle is mirrored).
pub fn gram(x: &DenseMatrix) -> DenseMatrix {
    let s = x.cols();
    let pairs: Vec<(usize, usize)> = (0..s).flat_map(|b| (0..=b).map(move |a| (a, b))).collect();
    let vals = par::map_range(pairs.len(), |k| {
        let (a, b) = pairs[k];
        dot(x.col(a), x.col(b))
    });
    let mut g = DenseMatrix::zeros(s, s);
    for (&(a, b), v) in pairs.iter().zip(vals) {
        g[(a, b)] = v;
        g[(b, a)] = v;
    }
    g
}

/// `X -= Q W`.
pub fn subtract_product(x: &mut DenseMatrix, q: &DenseMatrix, w: &DenseMatrix) {
    assert_eq!(q.rows(), x.rows());
    assert_eq!((w.rows(), w.cols()), (q.cols(), x.cols()));
    for b in 0..x.cols() {
        let coeffs = w.col(b);
        par::for_each_chunk_mut(x.col_mut(b), ROW_CHUNK, |ci, chunk| {
            let r0 = ci * ROW_CHUNK;
            for (a, &c) in coeffs.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let qa = &q.col(a)[r0..r0 + chunk.len()];
                for (xr, qr) in chunk.iter_mut().zip(qa) {
                    *xr -= c * qr;
                }
            }
        });
    }
}

/// `X <- X R⁻¹` for upper-triangular `R` (only the leading `X.cols()` columns of
/// `R` are used). Returns `false` when a diagonal entry of `R` is zero.
pub fn solve_upper_right_in_place(x: &mut DenseMatrix, r: &DenseMatrix) -> bool {
    let s = x.cols();
    assert!(r.rows() >= s && r.cols() >= s);
    if (0..s).any(|j| r[(j, j)] == 0.0) {
        return false;
    }
    let rows = x.rows();
    for j in 0..s {
        let (done, rest) = x.as_mut_slice().split_at_mut(j * rows);
        let target = &mut rest[..rows];
        let diag = r[(j, j)];
        par::for_each_chunk_mut(target, ROW_CHUNK, |ci, chunk| {
            let r0 = ci * ROW_CHUNK;
            for k in 0..j {
                let c = r[(k, j)];
                if c == 0.0 {
                    continue;
                }
                let xk = &done[k * rows + r0..k * rows + r0 + chunk.len()];
                for (t, v) in chunk.iter_mut().zip(xk) {
                    *t -= c * v;
                }
            }
            for t in chunk.iter_mut() {
                *t /= diag;
            }
        });
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tall(n: usize, s: usize, seed: u64) -> DenseMatrix {
        let mut state = seed;
        DenseMatrix::from_fn(n, s, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f64> = (0..13).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..13).map(|i| 1.0 / (i + 1) as f64).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-13);
    }

    #[test]
    fn gram_is_symmetric_and_matches_inner_products() {
        let x = tall(1000, 5, 3);
        let g = gram(&x);
        let ip = inner_products(&x, &x);
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(g[(i, j)], g[(j, i)]);
                assert!((g[(i, j)] - ip[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn subtract_then_solve() {
        let q = tall(5000, 3, 1);
        let w = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.5, -1.0], &[0.0, 3.0]]);
        let mut x = DenseMatrix::zeros(5000, 2);
        subtract_product(&mut x, &q, &w);
        let qw = q.matmul(&w);
        for j in 0..2 {
            for i in 0..5000 {
                assert!((x[(i, j)] + qw[(i, j)]).abs() < 1e-14);
            }
        }

        let r = DenseMatrix::from_rows(&[&[2.0, 1.0], &[0.0, 4.0]]);
        let mut y = q.columns(0, 2).matmul(&r);
        assert!(solve_upper_right_in_place(&mut y, &r));
        for j in 0..2 {
            for i in 0..5000 {
                assert!((y[(i, j)] - q[(i, j)]).abs() < 1e-14);
            }
        }
        let singular = DenseMatrix::from_rows(&[&[0.0, 1.0], &[0.0, 1.0]]);
        assert!(!solve_upper_right_in_place(&mut y, &singular));
    }
}
