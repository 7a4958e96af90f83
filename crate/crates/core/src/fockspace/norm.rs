use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::basis::Basis;
use super::context::QContext;
use super::expr::OpExpr;
use super::gram::{dot, gram_apply, gram_solve};
use super::operator::FockOperator;
use crate::error::{argument, Result};

/// Eigensolver used by [`op_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormMethod {
    Lanczos,
    Power,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub method: NormMethod,
    pub seed: u64,
    /// Return the final iterate (the Ritz vector for Lanczos).
    pub keep_vector: bool,
    /// Ignore structural q-adjoints and use `G^{-1} T^† G` instead.
    pub gram_route: bool,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            method: NormMethod::Lanczos,
            seed: 0,
            keep_vector: false,
            gram_route: false,
        }
    }
}

/// Result of a norm computation.
///
/// When `converged` is false, `value` is the last estimate and `residual` says how far off it was.
#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
    pub iterate: Option<Vec<C64>>,
}

/// Norm of `t` for the q-inner product on the truncated space.
///
/// This is `sqrt(λ_max)` for `T^♯ T`, where `T^♯` is the q-adjoint, i.e. the top eigenvalue of
/// `T^† G T x = λ G x`. Estimates from below converge upward in the truncation.
pub fn op_norm(ctx: &QContext, t: &OpExpr, opts: &NormOptions) -> Result<NormEstimate> {
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(argument("norm estimation needs tol > 0 and max_iter > 0"));
    }
    let basis = ctx.basis()?;
    let q = ctx.q();
    let structural = if opts.gram_route { None } else { t.q_adjoint() };
    let gram_op = |x: &[C64]| -> Result<Vec<C64>> {
        let tx = t.apply_dense(basis, q, x);
        match &structural {
            Some(adj) => Ok(adj.apply_dense(basis, q, &tx)),
            None => gram_solve(ctx, &t.apply_adjoint_dense(basis, q, &gram_apply(basis, q, &tx))),
        }
    };
    let start = start_vector(basis, opts.seed);
    match opts.method {
        NormMethod::Lanczos => lanczos(basis, q, gram_op, start, opts),
        NormMethod::Power => power(basis, q, gram_op, start, opts),
    }
}

/// [`op_norm`] for a sparse matrix with default options apart from `tol` and `max_iter`.
pub fn op_norm_matrix(ctx: &QContext, t: &FockOperator, tol: f64, max_iter: usize) -> Result<NormEstimate> {
    let opts = NormOptions { tol, max_iter, ..NormOptions::default() };
    op_norm(ctx, &OpExpr::from(t.clone()), &opts)
}

fn start_vector(basis: &Basis, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..basis.dim())
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect()
}

fn scaled(x: &[C64], s: f64) -> Vec<C64> {
    x.iter().map(|v| v * s).collect()
}

fn top_ritz(alphas: &[f64], betas: &[f64]) -> (f64, DMatrix<f64>, usize) {
    let k = alphas.len();
    let mut m = DMatrix::zeros(k, k);
    for i in 0..k {
        m[(i, i)] = alphas[i];
        if i + 1 < k {
            m[(i, i + 1)] = betas[i];
            m[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(m);
    let (imax, theta) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    (theta, eig.eigenvectors, imax)
}

fn lanczos(
    basis: &Basis,
    q: f64,
    op: impl Fn(&[C64]) -> Result<Vec<C64>>,
    start: Vec<C64>,
    opts: &NormOptions,
) -> Result<NormEstimate> {
    let g = gram_apply(basis, q, &start);
    let nrm = dot(&start, &g).re.sqrt();
    let mut v = scaled(&start, 1.0 / nrm);
    let mut gv = scaled(&g, 1.0 / nrm);
    let mut v_prev = basis.zeros();
    let mut beta = 0.0;
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    let mut kept: Vec<Vec<C64>> = Vec::new();
    let mut last_theta: Option<f64> = None;
    let mut theta = 0.0;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let mut ritz = None;
    for j in 1..=opts.max_iter {
        iterations = j;
        if opts.keep_vector {
            kept.push(v.clone());
        }
        let mut w = op(&v)?;
        let alpha = dot(&w, &gv).re;
        for i in 0..w.len() {
            w[i] -= v[i] * alpha + v_prev[i] * beta;
        }
        let gw = gram_apply(basis, q, &w);
        let beta_new = dot(&w, &gw).re.max(0.0).sqrt();
        alphas.push(alpha);
        let scale = alphas.iter().map(|a| a.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let breakdown = beta_new <= 1e-13 * scale;
        if j % 5 == 0 || breakdown || j == opts.max_iter {
            let (th, vecs, imax) = top_ritz(&alphas, &betas);
            theta = th;
            residual = beta_new * vecs[(j - 1, imax)].abs() / theta.abs().max(f64::MIN_POSITIVE);
            if opts.keep_vector {
                ritz = Some((vecs.column(imax).iter().copied().collect::<Vec<_>>(), imax));
            }
            let settled = last_theta.is_some_and(|p| (theta - p).abs() <= opts.tol * theta.abs());
            if breakdown || (settled && residual <= opts.tol.sqrt()) {
                converged = true;
                break;
            }
            last_theta = Some(theta);
        }
        v_prev = std::mem::replace(&mut v, scaled(&w, 1.0 / beta_new));
        gv = scaled(&gw, 1.0 / beta_new);
        beta = beta_new;
        betas.push(beta_new);
    }
    let iterate = ritz.map(|(s, _)| {
        let mut y = basis.zeros();
        for (c, vec) in s.iter().zip(&kept) {
            for (o, x) in y.iter_mut().zip(vec) {
                *o += x * *c;
            }
        }
        y
    });
    Ok(NormEstimate { value: theta.max(0.0).sqrt(), iterations, converged, residual, iterate })
}

fn power(
    basis: &Basis,
    q: f64,
    op: impl Fn(&[C64]) -> Result<Vec<C64>>,
    start: Vec<C64>,
    opts: &NormOptions,
) -> Result<NormEstimate> {
    let mut x = start;
    let mut theta = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let n = dot(&x, &x).re.sqrt();
        x = scaled(&x, 1.0 / n);
        let gx = gram_apply(basis, q, &x);
        let y = op(&x)?;
        let next = dot(&y, &gx).re / dot(&x, &gx).re;
        residual = (next - theta).abs() / next.abs().max(f64::MIN_POSITIVE);
        theta = next;
        if residual <= opts.tol || y.iter().all(|v| *v == C64::default()) {
            let iterate = opts.keep_vector.then_some(x);
            return Ok(NormEstimate { value: theta.max(0.0).sqrt(), iterations: it, converged: true, residual, iterate });
        }
        x = y;
    }
    let iterate = opts.keep_vector.then_some(x);
    Ok(NormEstimate {
        value: theta.max(0.0).sqrt(),
        iterations: opts.max_iter,
        converged: false,
        residual,
        iterate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::expr::NormalOrdered;
    use crate::fockspace::operator::{create, p_matrix};
    use crate::fockspace::word::{Letter, Word};
    use nalgebra::Cholesky;

    // Dense oracle: largest singular value of L^† M L^{-†}, where G = L L^†.
    fn dense_norm(ctx: &QContext, t: &OpExpr) -> f64 {
        let b = ctx.basis().unwrap();
        let n = b.dim();
        let q = ctx.q();
        let mut gm = DMatrix::<f64>::zeros(n, n);
        let mut tm = nalgebra::DMatrix::<nalgebra::Complex<f64>>::zeros(n, n);
        let mut e = b.zeros();
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            for (i, v) in gram_apply(b, q, &e).iter().enumerate() {
                gm[(i, j)] = v.re;
            }
            for (i, v) in t.apply_dense(b, q, &e).iter().enumerate() {
                tm[(i, j)] = *v;
            }
            e[j] = C64::default();
        }
        let l = Cholesky::new(gm).unwrap().l().map(|x| nalgebra::Complex::new(x, 0.0));
        let linv = l.clone().try_inverse().unwrap();
        let m = l.adjoint() * tm * linv.adjoint();
        m.singular_values().max()
    }

    #[test]
    fn identity_has_norm_one() {
        let ctx = QContext::new(0.5, 2, 3).unwrap();
        let est = op_norm(&ctx, &OpExpr::Identity, &NormOptions::default()).unwrap();
        assert!(est.converged);
        assert!((est.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn free_creation_is_an_isometry() {
        let ctx = QContext::new(0.0, 1, 8).unwrap();
        let a = create(&ctx, Letter::plain(1)).unwrap();
        let est = op_norm_matrix(&ctx, &a, 1e-10, 1000).unwrap();
        assert!((est.value - 1.0).abs() < 1e-8, "{est:?}");
    }

    #[test]
    fn matches_dense_oracle() {
        let (p1, b1, p2) = (Letter::plain(1), Letter::barred(1), Letter::plain(2));
        for &q in &[-0.6, 0.0, 0.5] {
            let ctx = QContext::new(q, 2, 3).unwrap();
            let exprs = vec![
                OpExpr::Sum(vec![OpExpr::Create(p1), OpExpr::Annihilate(b1)]),
                OpExpr::Product(vec![OpExpr::Create(p2), OpExpr::Annihilate(p1), OpExpr::Create(p1)]),
                NormalOrdered::from_terms([
                    (Word::new(vec![p1]), Word::new(vec![p2]), C64::new(1.0, 0.5)),
                    (Word::new(vec![b1, p2]), Word::empty(), C64::new(-0.3, 0.0)),
                ])
                .into(),
            ];
            for t in exprs {
                let oracle = dense_norm(&ctx, &t);
                for method in [NormMethod::Lanczos, NormMethod::Power] {
                    for gram_route in [false, true] {
                        let opts = NormOptions { method, gram_route, tol: 1e-12, ..NormOptions::default() };
                        let est = op_norm(&ctx, &t, &opts).unwrap();
                        assert!(est.converged);
                        let tol = if method == NormMethod::Power { 1e-4 } else { 1e-8 };
                        assert!((est.value - oracle).abs() < tol * oracle, "q={q} {method:?} {gram_route} {} vs {oracle}", est.value);
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_without_structural_adjoint_uses_gram_route() {
        let ctx = QContext::new(0.4, 1, 4).unwrap();
        let p = p_matrix(&ctx, 3).unwrap();
        assert!(!p.has_q_adjoint());
        let est = op_norm_matrix(&ctx, &p, 1e-10, 500).unwrap();
        let oracle = dense_norm(&ctx, &OpExpr::from(p));
        assert!((est.value - oracle).abs() < 1e-7 * oracle);
    }

    #[test]
    fn ritz_vector_attains_the_norm() {
        let ctx = QContext::new(0.3, 1, 6).unwrap();
        let c = OpExpr::Sum(vec![OpExpr::Create(Letter::plain(1)), OpExpr::Annihilate(Letter::barred(1))]);
        let opts = NormOptions { keep_vector: true, tol: 1e-12, ..NormOptions::default() };
        let est = op_norm(&ctx, &c, &opts).unwrap();
        let b = ctx.basis().unwrap();
        let x = est.iterate.unwrap();
        let cx = c.apply_dense(b, ctx.q(), &x);
        let ratio = (dot(&gram_apply(b, 0.3, &cx), &cx).re / dot(&gram_apply(b, 0.3, &x), &x).re).sqrt();
        assert!((ratio - est.value).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_options() {
        let ctx = QContext::new(0.3, 1, 2).unwrap();
        let opts = NormOptions { tol: 0.0, ..NormOptions::default() };
        assert!(op_norm(&ctx, &OpExpr::Identity, &opts).is_err());
    }

    #[test]
    fn nonconvergence_is_reported() {
        let ctx = QContext::new(0.3, 2, 4).unwrap();
        let c = OpExpr::Sum(vec![OpExpr::Create(Letter::plain(1)), OpExpr::Annihilate(Letter::barred(2))]);
        let opts = NormOptions { method: NormMethod::Power, max_iter: 2, tol: 1e-14, keep_vector: true, ..NormOptions::default() };
        let est = op_norm(&ctx, &c, &opts).unwrap();
        assert!(!est.converged);
        assert!(est.residual > 0.0 && est.iterate.is_some());
    }
}
