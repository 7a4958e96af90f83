use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qfock_core::combinatorics::{constants, DEFAULT_SERIES_TOL};
use qfock_core::fockspace::*;
use qfock_core::qcircular::{c_expr, q_commutation_residual, r_star_residual, tensor_contraction_residual};

fn dense_level(a: usize, n: usize, apply: impl Fn(&[C64]) -> Vec<C64>) -> DMatrix<f64> {
    let dim = a.pow(n as u32);
    let mut m = DMatrix::zeros(dim, dim);
    let mut e = vec![C64::default(); dim];
    for j in 0..dim {
        e[j] = C64::new(1.0, 0.0);
        let col = apply(&e);
        for (i, v) in col.iter().enumerate() {
            assert!(v.im.abs() < 1e-15);
            m[(i, j)] = v.re;
        }
        e[j] = C64::default();
    }
    m
}

fn min_eigenvalue(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.min()
}

#[test]
fn symmetrizer_is_positive_definite() {
    for &q in &[-0.7, -0.3, 0.3, 0.7] {
        for (a, max_n) in [(2, 5), (4, 4)] {
            for n in 1..=max_n {
                let p = dense_level(a, n, |x| p_apply_level(q, a, n, x));
                assert!((&p - p.transpose()).amax() < 1e-12);
                let lo = min_eigenvalue(p);
                assert!(lo > 0.0, "q={q} a={a} n={n}: {lo}");
            }
        }
    }
}

#[test]
fn symmetrizer_dominated_by_split() {
    for &q in &[-0.7, -0.3, 0.3, 0.7] {
        let c = constants(q, DEFAULT_SERIES_TOL).unwrap().c_q;
        let a = 2;
        for n in 1..=5 {
            let p = dense_level(a, n, |x| p_apply_level(q, a, n, x));
            for k in 0..=n {
                let s = dense_level(a, n, |x| p_apply_split(q, a, k, n, x));
                let lo = min_eigenvalue(s * c - &p);
                assert!(lo >= -1e-10, "q={q} n={n} k={k}: {lo}");
            }
        }
    }
}

#[test]
fn q_commutation_on_all_levels() {
    for &q in &[-0.7, -0.3, 0.0, 0.3, 0.7] {
        for d in 1..=2 {
            let ctx = QContext::new(q, d, 6).unwrap();
            let r = q_commutation_residual(&ctx).unwrap();
            assert!(r.residual < 1e-12, "{r:?}");
        }
    }
}

#[test]
fn r_star_and_contraction_bounds() {
    for &q in &[-0.7, 0.3, 0.7] {
        for d in 1..=2 {
            assert!(r_star_residual(q, d, 5 - d, 3, 11).unwrap().residual <= 1e-10);
            assert!(tensor_contraction_residual(q, d, 4, 11).unwrap().residual <= 1e-10);
        }
    }
}

#[test]
fn r_two_four_norm_below_c() {
    // Euclidean operator norm of the coset sum on level 4
    for &q in &[-0.5, 0.5] {
        let ctx = QContext::new(q, 1, 4).unwrap();
        let c = constants(q, DEFAULT_SERIES_TOL).unwrap().c_q;
        let r = r_matrix(&ctx, 2, 4).unwrap();
        let basis = ctx.basis().unwrap();
        let range = basis.level_range(4);
        let block = r.matrix().block(range.clone(), range);
        let m = DMatrix::from_fn(block.len(), block.len(), |i, j| block[i][j].re);
        let euclid = m.svd(false, false).singular_values.max();
        assert!(euclid <= c + 1e-10, "q={q}: {euclid} vs {c}");
    }
}

#[test]
fn compression_monotone() {
    for &q in &[-0.6, 0.0, 0.6] {
        let base = QContext::new(q, 1, 3).unwrap();
        let t = OpExpr::Product(vec![c_expr(1), c_expr(1)]);
        let mut prev = 0.0;
        for trunc in 3..=9 {
            let ctx = base.with_trunc(trunc).unwrap();
            let v = op_norm(&ctx, &t, &NormOptions { tol: 1e-12, ..Default::default() }).unwrap().value;
            assert!(v >= prev - 1e-8, "q={q} trunc={trunc}: {v} < {prev}");
            prev = v;
        }
    }
}

#[test]
fn creation_norm_bound() {
    // ‖a(ξ)‖ ≤ C^{1/2} ‖ξ‖ for a single letter combination
    for &q in &[-0.7, 0.0, 0.7] {
        let ctx = QContext::new(q, 2, 7).unwrap();
        let c = constants(q, DEFAULT_SERIES_TOL).unwrap().c_q;
        let t = OpExpr::Sum(vec![
            OpExpr::Create(Letter::plain(1)).scaled(C64::new(0.6, 0.0)),
            OpExpr::Create(Letter::barred(2)).scaled(C64::new(0.0, 0.8)),
        ]);
        let v = op_norm(&ctx, &t, &NormOptions::default()).unwrap().value;
        assert!(v <= c.sqrt() + 1e-9, "q={q}: {v}");
        if q >= 0.0 {
            assert!(v >= 1.0 - 1e-9);
        }
    }
}

fn small_vector() -> impl Strategy<Value = FockVector> {
    prop::collection::vec(((0usize..4, 0usize..4, 0usize..4), 0usize..4, -1.0f64..1.0, -1.0f64..1.0), 1..8).prop_map(
        |entries| {
            entries
                .into_iter()
                .map(|((a, b, c), len, re, im)| {
                    let letters: Vec<Letter> = [a, b, c][..len.min(3)].iter().map(|&k| Letter::from_code(k, 2)).collect();
                    (Word::new(letters), C64::new(re, im))
                })
                .collect()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_inner_is_hermitian_and_positive(x in small_vector(), y in small_vector(), q in -0.9f64..0.9) {
        let xy = q_inner(q, &x, &y);
        let yx = q_inner(q, &y, &x);
        prop_assert!((xy - yx.conj()).norm() < 1e-12);
        prop_assert!(q_inner(q, &x, &x).re >= -1e-12);
        prop_assert!(xy.norm() <= q_norm(q, &x) * q_norm(q, &y) + 1e-12);
    }

    #[test]
    fn star_is_anti_unitary(x in small_vector(), y in small_vector(), q in -0.9f64..0.9) {
        let lhs = q_inner(q, &x.star(), &y.star());
        prop_assert!((lhs - q_inner(q, &x, &y).conj()).norm() < 1e-12);
        prop_assert_eq!(x.star().star(), x);
    }

    #[test]
    fn annihilation_is_q_adjoint_of_creation(x in small_vector(), y in small_vector(), code in 0usize..4, q in -0.9f64..0.9) {
        let l = Letter::from_code(code, 2);
        let lhs = q_inner(q, &x.create(l, 8), &y);
        let rhs = q_inner(q, &x, &y.annihilate(l, q));
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }
}
