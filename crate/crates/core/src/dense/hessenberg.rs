//! Eigenvalues of a real upper-Hessenberg matrix by the Francis double-shift
//! QR iteration (the eigenvalue-only part of EISPACK `hqr`).
//!
//! Shifts are deterministic, including the exceptional shifts after 10 and
//! 30 stagnant iterations, so reruns reproduce the same bits.

use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{Error, Result};

pub fn hessenberg_eigenvalues(h: &DenseMatrix) -> Result<Vec<Complex64>> {
    let nn = h.rows();
    if nn == 0 || h.cols() != nn {
        return Err(Error::DimensionMismatch {
            expected: nn.max(1),
            got: h.cols(),
        });
    }
    if !h.is_finite() {
        return Err(Error::NonFinite("Hessenberg matrix"));
    }
    let mut a: Vec<Vec<f64>> = (0..nn)
        .map(|i| (0..nn).map(|j| h[(i, j)]).collect())
        .collect();
    for (i, row) in a.iter_mut().enumerate() {
        for v in row.iter_mut().take(i.saturating_sub(1)) {
            *v = 0.0;
        }
    }
    let mut wr = vec![0.0; nn];
    let mut wi = vec![0.0; nn];

    let eps = f64::EPSILON;
    let mut norm = 0.0;
    for (i, row) in a.iter().enumerate() {
        for v in &row[i.saturating_sub(1)..] {
            norm += v.abs();
        }
    }

    let max_iter = 30 * nn.max(10);
    let mut total = 0usize;
    let mut n = nn as isize - 1;
    let mut exshift = 0.0;
    let mut iter = 0usize;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut w, mut x, mut y);

    while n >= 0 {
        let nu = n as usize;
        let mut l = nu;
        while l > 0 {
            s = a[l - 1][l - 1].abs() + a[l][l].abs();
            if s == 0.0 {
                s = norm;
            }
            if a[l][l - 1].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            wr[nu] = a[nu][nu] + exshift;
            wi[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l + 1 == nu {
            w = a[nu][nu - 1] * a[nu - 1][nu];
            p = (a[nu - 1][nu - 1] - a[nu][nu]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            x = a[nu][nu] + exshift;
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                wr[nu - 1] = x + z;
                wr[nu] = if z != 0.0 { x - w / z } else { x + z };
                wi[nu - 1] = 0.0;
                wi[nu] = 0.0;
            } else {
                wr[nu - 1] = x + p;
                wr[nu] = x + p;
                wi[nu - 1] = z;
                wi[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            if total >= max_iter {
                return Err(Error::EigenNoConvergence { index: nu });
            }
            x = a[nu][nu];
            y = a[nu - 1][nu - 1];
            w = a[nu][nu - 1] * a[nu - 1][nu];

            if iter == 10 {
                exshift += x;
                for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                    row[i] -= x;
                }
                s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for (i, row) in a.iter_mut().enumerate().take(nu + 1) {
                        row[i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total += 1;

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = a[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s;
                r = a[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if a[m][m - 1].abs() * (q.abs() + r.abs())
                    < eps * (p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nu {
                a[i][i - 2] = 0.0;
                if i > m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }

            // Double QR step on rows and columns l..=n.
            x = 0.0;
            for k in m..nu {
                let notlast = k + 1 != nu;
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if notlast { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s == 0.0 {
                    continue;
                }
                if k != m {
                    a[k][k - 1] = -s * x;
                } else if l != m {
                    a[k][k - 1] = -a[k][k - 1];
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;

                for j in k..nn {
                    p = a[k][j] + q * a[k + 1][j];
                    if notlast {
                        p += r * a[k + 2][j];
                        a[k + 2][j] -= p * z;
                    }
                    a[k][j] -= p * x;
                    a[k + 1][j] -= p * y;
                }
                for row in a.iter_mut().take(nu.min(k + 3) + 1) {
                    p = x * row[k] + y * row[k + 1];
                    if notlast {
                        p += z * row[k + 2];
                        row[k + 2] -= p * r;
                    }
                    row[k] -= p;
                    row[k + 1] -= p * q;
                }
            }
        }
    }

    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect())
}
