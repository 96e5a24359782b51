//! Property tests against independent dense oracles.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use sgmres::basis::{matrix_powers_kernel, BasisKind, ChangeOfBasis, RitzSet};
use sgmres::dense::{
    gram, hessenberg_eigenvalues, partial_cholesky, svd_condition, ConditionMonitor, DenseMatrix,
    GivensLeastSquares, StopReason,
};
use sgmres::operator::LeftPreconditioned;
use sgmres::ortho::bcgs2_partial_cholqr;
use sgmres::sparse::{equilibrate, EquilibrationMode, Ilu0Preconditioner};
use sgmres::SparseMatrix;

fn to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.rows(), m.cols(), m.as_slice())
}

fn from_na(m: &DMatrix<f64>) -> DenseMatrix {
    DenseMatrix::from_column_major(m.nrows(), m.ncols(), m.as_slice().to_vec())
}

/// Sparse matrix with a guaranteed diagonal and random off-diagonal entries.
fn sparse_strategy(max_n: usize, dominant: bool) -> impl Strategy<Value = SparseMatrix> {
    (2..=max_n).prop_flat_map(move |n| {
        let entries = prop::collection::vec((0..n, 0..n, -1.0f64..1.0), 0..4 * n);
        let diag = prop::collection::vec(0.5f64..2.0, n);
        (entries, diag).prop_map(move |(entries, diag)| {
            let mut trip: Vec<(usize, usize, f64)> =
                entries.into_iter().filter(|(r, c, _)| r != c).collect();
            let mut row_sum = vec![0.0; n];
            for &(r, _, v) in &trip {
                row_sum[r] += f64::abs(v);
            }
            for (i, d) in diag.iter().enumerate() {
                let extra = if dominant { row_sum[i] } else { 0.0 };
                trip.push((i, i, d + extra));
            }
            SparseMatrix::from_triplets(n, &trip).unwrap()
        })
    })
}

fn dense_of(a: &SparseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.n(), a.n(), &a.to_dense())
}

/// Columns `x, Dx, D²x, …` of a diagonal Krylov sequence, normalised to unit
/// first column.
fn krylov_columns(d: &[f64], x: &[f64], s: usize) -> DenseMatrix {
    let n = d.len();
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut v = DenseMatrix::zeros(n, s);
    for i in 0..n {
        v[(i, 0)] = x[i] / nx;
    }
    for j in 1..s {
        for i in 0..n {
            v[(i, j)] = d[i] * v[(i, j - 1)];
        }
    }
    v
}

fn krylov_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize)> {
    (20usize..120).prop_flat_map(|n| {
        (
            prop::collection::vec(0.1f64..10.0, n),
            prop::collection::vec(-1.0f64..1.0, n),
            2usize..24,
        )
    })
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

fn leja_product(points: &[Complex64], z: Complex64) -> f64 {
    points.iter().map(|p| (z - p).norm().ln()).sum()
}

fn conjugate_closed(raw: Vec<(f64, f64)>) -> Vec<Complex64> {
    let mut out = Vec::new();
    for (re, im) in raw {
        if im.abs() < 0.3 {
            out.push(Complex64::new(re, 0.0));
        } else {
            out.push(Complex64::new(re, im.abs()));
            out.push(Complex64::new(re, -im.abs()));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spmv_matches_dense_product(a in sparse_strategy(30, false), seed in any::<u64>()) {
        let n = a.n();
        let x: Vec<f64> = (0..n).map(|i| ((seed.wrapping_add(i as u64) % 17) as f64) - 8.0).collect();
        let y = a.spmv(&x).unwrap();
        let oracle = dense_of(&a) * DVector::from_column_slice(&x);
        for i in 0..n {
            prop_assert!((y[i] - oracle[i]).abs() <= 1e-12 * (1.0 + oracle[i].abs()));
        }
    }

    #[test]
    fn column_equilibration_round_trip(a in sparse_strategy(25, false), xs in prop::collection::vec(-1.0f64..1.0, 25)) {
        let n = a.n();
        let (scaled, eq) = equilibrate(&a, EquilibrationMode::Column, None).unwrap();
        for norm in scaled.column_norms() {
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
        let x = &xs[..n];
        let back = eq.unscale_solution(&eq.scale_solution(x));
        for (u, v) in back.iter().zip(x) {
            prop_assert!((u - v).abs() <= 1e-14 * (1.0 + v.abs()));
        }
        // D_r A D_c (D_c⁻¹ x) = D_r A x
        let lhs = scaled.spmv(&eq.scale_solution(x)).unwrap();
        let rhs = eq.scale_rhs(&a.spmv(x).unwrap());
        for (u, v) in lhs.iter().zip(&rhs) {
            prop_assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn scalar_equilibration_divides_by_alpha(a in sparse_strategy(20, false), alpha in 0.01f64..100.0) {
        let (scaled, _) = equilibrate(&a, EquilibrationMode::Scalar, Some(alpha)).unwrap();
        let ad = dense_of(&a) / alpha;
        let sd = dense_of(&scaled);
        prop_assert!((ad - sd).norm() <= 1e-13 * (1.0 + dense_of(&a).norm() / alpha));
    }

    #[test]
    fn ilu0_matches_a_on_its_pattern(a in sparse_strategy(30, true)) {
        let n = a.n();
        let ilu = Ilu0Preconditioner::factor(&a).unwrap();
        let f = dense_of(ilu.factors());
        let l = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else if i > j { f[(i, j)] } else { 0.0 });
        let u = DMatrix::from_fn(n, n, |i, j| if i <= j { f[(i, j)] } else { 0.0 });
        let lu = &l * &u;
        let ad = dense_of(&a);
        for r in 0..n {
            for (c, _) in a.row(r) {
                prop_assert!((lu[(r, c)] - ad[(r, c)]).abs() <= 1e-12 * (1.0 + ad.norm()));
            }
        }
        // The preconditioner inverts the product of its own factors exactly.
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let rhs = &lu * DVector::from_column_slice(&x);
        let z = ilu.apply(rhs.as_slice()).unwrap();
        for (zi, xi) in z.iter().zip(&x) {
            prop_assert!((zi - xi).abs() <= 1e-9);
        }
    }

    #[test]
    fn complete_cholesky_reproduces_gram((d, x, s) in krylov_strategy()) {
        let v = krylov_columns(&d, &x, s.min(4));
        let g = gram(&v);
        let res = partial_cholesky(&g, 1e300, ConditionMonitor::Ice).unwrap();
        prop_assume!(res.stop == StopReason::Complete);
        let r = to_na(&res.r);
        let back = r.transpose() * &r;
        let gn = to_na(&g);
        prop_assert!((back - &gn).norm() <= 1e-12 * gn.norm());
    }

    #[test]
    fn accepted_factor_condition_is_bounded((d, x, s) in krylov_strategy(), log_omega in 2.0f64..10.0) {
        let omega = 10f64.powf(log_omega);
        let g = gram(&krylov_columns(&d, &x, s));
        let exact = partial_cholesky(&g, omega, ConditionMonitor::Svd).unwrap();
        let truth = to_na(&exact.r).singular_values();
        prop_assert!(truth.max() / truth.min() <= omega * (1.0 + 1e-8));
        let ice = partial_cholesky(&g, omega, ConditionMonitor::Ice).unwrap();
        let sv = to_na(&ice.r).singular_values();
        prop_assert!(sv.max() / sv.min() <= 10.0 * omega);
    }

    #[test]
    fn truncation_is_monotone_in_omega((d, x, s) in krylov_strategy(), lo in 1.0f64..8.0, gap in 0.0f64..4.0) {
        let g = gram(&krylov_columns(&d, &x, s));
        for monitor in [ConditionMonitor::Ice, ConditionMonitor::Svd] {
            let small = partial_cholesky(&g, 10f64.powf(lo), monitor).unwrap();
            let large = partial_cholesky(&g, 10f64.powf(lo + gap), monitor).unwrap();
            prop_assert!(small.p <= large.p);
        }
    }

    #[test]
    fn partial_cholesky_prefix_is_bitwise_stable((d, x, s) in krylov_strategy()) {
        let g = gram(&krylov_columns(&d, &x, s));
        let full = partial_cholesky(&g, 1e7, ConditionMonitor::Ice).unwrap();
        for m in full.p..=s {
            let part = partial_cholesky(&g.leading(m, m), 1e7, ConditionMonitor::Ice).unwrap();
            prop_assert_eq!(part.p, full.p);
            let bits = |r: &DenseMatrix| r.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&part.r), bits(&full.r));
        }
    }

    #[test]
    fn svd_condition_matches_nalgebra(entries in prop::collection::vec(-1.0f64..1.0, 36), n in 1usize..6) {
        let r = DenseMatrix::from_fn(n, n, |i, j| if i <= j { entries[i * 6 + j] + if i == j { 2.0 } else { 0.0 } } else { 0.0 });
        let sv = to_na(&r).singular_values();
        let truth = sv.max() / sv.min();
        prop_assert!((svd_condition(&r) - truth).abs() <= 1e-10 * truth);
    }

    #[test]
    fn companion_eigenvalues_are_its_roots(raw in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6)) {
        let roots = conjugate_closed(raw);
        // Monic polynomial coefficients from the roots.
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in &roots {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k] += c;
                next[k + 1] -= c * r;
            }
            coeffs = next;
        }
        let n = roots.len();
        let comp = DenseMatrix::from_fn(n, n, |i, j| {
            if i == 0 {
                -coeffs[j + 1].re
            } else if i == j + 1 {
                1.0
            } else {
                0.0
            }
        });
        let eig = hessenberg_eigenvalues(&comp).unwrap();
        prop_assert_eq!(eig.len(), n);
        let scale = 1.0 + roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
        // Repeated roots are ill-conditioned, so match each root within a loose
        // tolerance and check the pairing is one-to-one.
        let mut used = vec![false; n];
        for r in &roots {
            let best = (0..n)
                .filter(|&k| !used[k])
                .min_by(|&a, &b| (eig[a] - r).norm().partial_cmp(&(eig[b] - r).norm()).unwrap())
                .unwrap();
            used[best] = true;
            prop_assert!((eig[best] - r).norm() <= 1e-3 * scale, "{:?} vs {:?}", eig, roots);
        }
        for z in eig.iter().filter(|z| z.im != 0.0) {
            prop_assert!(eig.contains(&z.conj()));
        }
    }

    #[test]
    fn leja_order_is_greedy_optimal(raw in prop::collection::vec((-4i32..4, -3i32..3), 1..6)) {
        let pts = conjugate_closed(raw.into_iter().map(|(a, b)| (a as f64 * 0.5, b as f64 * 0.5)).collect());
        prop_assume!(pts.len() <= 8);
        let set = RitzSet::leja_order(&pts).unwrap();
        let vals = set.values();
        prop_assert_eq!(vals.len(), pts.len());
        let max_mod = pts.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert_eq!(vals[0].norm(), max_mod);
        let mut k = 1;
        while k < vals.len() {
            if vals[k - 1].im > 0.0 {
                // Conjugate immediately follows its partner.
                prop_assert_eq!(vals[k], vals[k - 1].conj());
                k += 1;
                continue;
            }
            prop_assert!(vals[k].im >= 0.0, "a pair must start with its upper member");
            let chosen = &vals[..k];
            let remaining: Vec<Complex64> = {
                let mut rest = pts.clone();
                for c in chosen {
                    let i = rest.iter().position(|z| z == c).unwrap();
                    rest.remove(i);
                }
                rest
            };
            let best = remaining.iter().map(|&z| leja_product(chosen, z)).fold(f64::NEG_INFINITY, f64::max);
            let got = leja_product(chosen, vals[k]);
            prop_assert!(got >= best - 1e-12 * best.abs().max(1.0) || got == best);
            k += 1;
        }
    }

    #[test]
    fn block_qr_columns_are_orthonormal((d, x, s) in krylov_strategy()) {
        let n = d.len();
        let v = krylov_columns(&d, &x, s.min(n - 1) + 1);
        let out = bcgs2_partial_cholqr(&DenseMatrix::zeros(n, 0), &v, 1e7, ConditionMonitor::Ice).unwrap();
        let mut q = DenseMatrix::from_columns(n, &[v.col(0).to_vec()]);
        for c in 0..out.p {
            q.push_col(out.q_new.col(c));
        }
        for c in 0..q.cols() {
            let nrm = q.col(c).iter().map(|t| t * t).sum::<f64>().sqrt();
            prop_assert!((nrm - 1.0).abs() < 1e-12);
        }
        let qn = to_na(&q);
        let loo = (qn.transpose() * &qn - DMatrix::identity(q.cols(), q.cols())).norm();
        prop_assert!(loo < 1e-12);
        // V[:, ..=p] = Q R̂
        let rebuilt = &qn * to_na(&out.r_hat);
        let vp = to_na(&v.columns(0, out.p + 1));
        prop_assert!((rebuilt - &vp).norm() <= 1e-10 * vp.norm());
        prop_assert_eq!(out.reductions.gram_products + out.reductions.projections, 4);
    }

    #[test]
    fn givens_least_squares_is_optimal(cols in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 12), 1..10), beta in 0.1f64..10.0) {
        let k = cols.len();
        let mut ls = GivensLeastSquares::new(beta);
        let mut h = DMatrix::zeros(k + 1, k);
        let mut last = 0.0;
        for (j, c) in cols.iter().enumerate() {
            let mut col = c[..j + 2].to_vec();
            col[j + 1] = col[j + 1].abs() + 0.1;
            for (i, v) in col.iter().enumerate() {
                h[(i, j)] = *v;
            }
            last = ls.push_column(&col);
        }
        let y = ls.solve(k);
        let mut rhs = DVector::zeros(k + 1);
        rhs[0] = beta;
        let yv = DVector::from_column_slice(&y);
        let res = (&rhs - &h * &yv).norm();
        prop_assert!((res - last).abs() <= 1e-10 * beta);
        let oracle = h.clone().svd(true, true).solve(&rhs, 1e-14).unwrap();
        let best = (&rhs - &h * &oracle).norm();
        prop_assert!(res <= best + 1e-10 * beta);
        // Perturbing the solution never lowers the residual.
        for j in 0..k {
            let mut yp = yv.clone();
            yp[j] += 1e-3;
            prop_assert!((&rhs - &h * &yp).norm() >= res - 1e-12 * beta);
        }
    }
}

fn dyadic_problem(diag: &[i32], shift: i32) -> (SparseMatrix, Vec<f64>) {
    let n = diag.len();
    let trip: Vec<(usize, usize, f64)> = diag
        .iter()
        .enumerate()
        .map(|(i, &d)| (i, i, f64::from(d + shift)))
        .chain((0..n - 1).map(|i| (i, i + 1, 1.0)))
        .collect();
    let a = SparseMatrix::from_triplets(n, &trip).unwrap();
    let mut q = vec![0.0; n];
    for v in q.iter_mut().take(4) {
        *v = 0.5;
    }
    (a, q)
}

fn bits(m: &DenseMatrix) -> Vec<u64> {
    m.as_slice().iter().map(|v| v.to_bits()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scaled_newton_is_shift_invariant_on_dyadic_data(
        diag in prop::collection::vec(-6i32..6, 6..20),
        centre in -4i32..4,
        shift in -8i32..8,
        s in 1usize..5,
    ) {
        // Shifts symmetric about the centre at power-of-two distances keep every
        // scaling and every basis entry dyadic, so both runs are exact.
        let m = f64::from(centre);
        let theta: Vec<Complex64> = [1.0, -1.0, 2.0, -2.0, 4.0, -4.0]
            .iter()
            .map(|d| Complex64::new(m + d, 0.0))
            .collect();
        let ritz = RitzSet::leja_order(&theta).unwrap();
        let (a, q) = dyadic_problem(&diag, 0);
        let (a_shift, _) = dyadic_problem(&diag, shift);
        let c = f64::from(shift);
        let base = ChangeOfBasis::for_kind(BasisKind::ScaledNewton, Some(&ritz), s).unwrap();
        let moved = ChangeOfBasis::for_kind(BasisKind::ScaledNewton, Some(&ritz.shifted(c)), s).unwrap();
        prop_assert_eq!(base.subdiag(), moved.subdiag());
        let v1 = matrix_powers_kernel(&LeftPreconditioned::new(&a, None), &q, s, &base).unwrap();
        let v2 = matrix_powers_kernel(&LeftPreconditioned::new(&a_shift, None), &q, s, &moved).unwrap();
        prop_assert_eq!(bits(&v1.v), bits(&v2.v));
    }

    #[test]
    fn scaled_newton_is_shift_invariant_to_roundoff(
        diag in prop::collection::vec(0.1f64..10.0, 10..40),
        shift in -5.0f64..5.0,
        s in 1usize..8,
    ) {
        let n = diag.len();
        let theta: Vec<Complex64> = (0..8).map(|k| Complex64::new(diag[k * (n - 1) / 7], 0.0)).collect();
        let ritz = RitzSet::leja_order(&theta).unwrap();
        let a = SparseMatrix::from_diagonal(&diag);
        let a_shift = SparseMatrix::from_diagonal(&diag.iter().map(|d| d + shift).collect::<Vec<_>>());
        let q = unit(&vec![1.0; n]);
        let base = ChangeOfBasis::for_kind(BasisKind::ScaledNewton, Some(&ritz), s).unwrap();
        let moved = ChangeOfBasis::for_kind(BasisKind::ScaledNewton, Some(&ritz.shifted(shift)), s).unwrap();
        let v1 = matrix_powers_kernel(&LeftPreconditioned::new(&a, None), &q, s, &base).unwrap();
        let v2 = matrix_powers_kernel(&LeftPreconditioned::new(&a_shift, None), &q, s, &moved).unwrap();
        let diff = to_na(&v1.v) - to_na(&v2.v);
        prop_assert!(diff.norm() <= 1e-10 * to_na(&v1.v).norm());
    }

    #[test]
    fn scaled_newton_is_scale_invariant_for_powers_of_two(
        diag in prop::collection::vec(0.1f64..10.0, 10..40),
        imag in 0.1f64..2.0,
        e in -6i32..6,
        s in 2usize..8,
    ) {
        let n = diag.len();
        let alpha = 2f64.powi(e);
        // Include a conjugate pair to exercise the coupled step.
        let mut theta: Vec<Complex64> = (0..6).map(|k| Complex64::new(diag[k * (n - 1) / 5], 0.0)).collect();
        theta.push(Complex64::new(diag[0], imag));
        theta.push(Complex64::new(diag[0], -imag));
        let ritz = RitzSet::leja_order(&theta).unwrap();
        let a = SparseMatrix::from_diagonal(&diag);
        let a_scaled = SparseMatrix::from_diagonal(&diag.iter().map(|d| d * alpha).collect::<Vec<_>>());
        let q = unit(&(0..n).map(|i| 1.0 + (i % 3) as f64).collect::<Vec<_>>());
        let base = ChangeOfBasis::for_kind(BasisKind::ScaledNewton, Some(&ritz), s).unwrap();
        let scaled = ChangeOfBasis::for_kind(BasisKind::ScaledNewton, Some(&ritz.scaled(alpha)), s).unwrap();
        for (g, h) in base.subdiag().iter().zip(scaled.subdiag()) {
            prop_assert_eq!(g * alpha, *h);
        }
        let v1 = matrix_powers_kernel(&LeftPreconditioned::new(&a, None), &q, s, &base).unwrap();
        let v2 = matrix_powers_kernel(&LeftPreconditioned::new(&a_scaled, None), &q, s, &scaled).unwrap();
        prop_assert_eq!(bits(&v1.v), bits(&v2.v));
    }

    #[test]
    fn recurrence_holds_for_every_basis(
        diag in prop::collection::vec(0.5f64..5.0, 10..40),
        pairs in prop::collection::vec((0.5f64..5.0, 0.1f64..2.0), 0..3),
        s in 1usize..10,
    ) {
        let n = diag.len();
        let mut theta: Vec<Complex64> = diag.iter().take(4).map(|&d| Complex64::new(d, 0.0)).collect();
        for (re, im) in pairs {
            theta.push(Complex64::new(re, im));
            theta.push(Complex64::new(re, -im));
        }
        let ritz = RitzSet::leja_order(&theta).unwrap();
        let mut trip: Vec<(usize, usize, f64)> = diag.iter().enumerate().map(|(i, &d)| (i, i, d)).collect();
        trip.extend((0..n - 1).map(|i| (i + 1, i, 0.3)));
        let a = SparseMatrix::from_triplets(n, &trip).unwrap();
        let q = unit(&(0..n).map(|i| ((i * 7) % 5) as f64 - 1.5).collect::<Vec<_>>());
        for kind in [BasisKind::Monomial, BasisKind::Newton, BasisKind::ScaledNewton] {
            let basis = ChangeOfBasis::for_kind(kind, Some(&ritz), s).unwrap();
            let blk = matrix_powers_kernel(&LeftPreconditioned::new(&a, None), &q, s, &basis).unwrap();
            let p = blk.s;
            let v = to_na(&blk.v.columns(0, p + 1));
            let b = to_na(&basis.matrix(p));
            let ad = dense_of(&a);
            let res = (&ad * v.columns(0, p) - &v * &b).norm();
            let scale = ad.norm() * v.norm() + v.norm() * b.norm();
            prop_assert!(res <= 1e-14 * scale, "{kind}: {res:e} vs {scale:e}");
        }
    }
}

#[test]
fn block_qr_matches_householder_span() {
    // Deterministic companion to the acceptance suite: project against a
    // previous basis and compare spans with nalgebra's Householder QR.
    let n = 48;
    let prev = DMatrix::from_fn(n, 5, |i, j| ((i * 31 + j * 17) % 23) as f64 - 11.0)
        .qr()
        .q();
    let d: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 / 8.0).collect();
    let mut v = DMatrix::zeros(n, 7);
    v.set_column(0, &prev.column(4));
    for j in 1..7 {
        for i in 0..n {
            v[(i, j)] = d[i] * v[(i, j - 1)];
        }
    }
    let out =
        bcgs2_partial_cholqr(&from_na(&prev), &from_na(&v), 1e7, ConditionMonitor::Ice).unwrap();
    assert!(out.p >= 1);
    let mut ours = prev.clone().resize_horizontally(5 + out.p, 0.0);
    let mut stacked = ours.clone();
    for c in 0..out.p {
        ours.set_column(5 + c, &DVector::from_column_slice(out.q_new.col(c)));
        stacked.set_column(5 + c, &v.column(c + 1));
    }
    let hh = stacked.qr().q();
    let sine = (&ours - &hh * (hh.transpose() * &ours))
        .singular_values()
        .max();
    assert!(sine < 1e-10, "principal angle sine {sine:e}");
}
