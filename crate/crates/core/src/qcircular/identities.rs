use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::operators::{
    adjoint_product_expr, expand_word_terms, inverse_action, monomial_expr, normal_order_terms,
    one_variable_normal_order, wick_terms,
};
use crate::combinatorics::{constants, coset_representatives, DEFAULT_SERIES_TOL};
use crate::error::{argument, Result};
use crate::fockspace::{
    annihilate, create, gram_entry, p_apply_split, p_column, q_inner, q_norm, Basis, FockOperator, FockVector,
    Letter, OpExpr, QContext, Word,
};

/// Largest deviation found for one identity or inequality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub cases: usize,
}

/// Every word of length at most `max_level` over `n` plain letters (`n = d`) or all `2d` letters.
fn words_up_to(d: usize, max_level: usize, with_bars: bool) -> Vec<Word> {
    let letters: Vec<Letter> = (1..=d)
        .map(Letter::plain)
        .chain((1..=d).map(Letter::barred).filter(|_| with_bars))
        .collect();
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..max_level {
        frontier = frontier
            .iter()
            .flat_map(|w| letters.iter().map(move |&l| Word::new([w.letters(), &[l]].concat())))
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

fn random_vector(words: &[Word], rng: &mut ChaCha8Rng) -> FockVector {
    words
        .iter()
        .map(|w| (w.clone(), C64::new(StandardNormal.sample(&mut *rng), StandardNormal.sample(&mut *rng))))
        .collect()
}

/// Compares two expressions on every basis word whose image stays inside the truncation.
fn compare(ctx: &QContext, a: &OpExpr, b: &OpExpr, degree: usize, sources: &[Word]) -> f64 {
    let top = ctx.trunc().saturating_sub(degree);
    sources
        .iter()
        .filter(|w| w.len() <= top)
        .map(|w| {
            let x = FockVector::basis(w.clone());
            a.apply_vector(ctx.q(), ctx.trunc(), &x).max_abs_diff(&b.apply_vector(ctx.q(), ctx.trunc(), &x))
        })
        .fold(0.0, f64::max)
}

/// `a*_i a_j − q a_j a*_i − δ_ij` on every column below the top level.
pub fn q_commutation_residual(ctx: &QContext) -> Result<IdentityCheck> {
    let letters: Vec<Letter> = (1..=ctx.d()).flat_map(|i| [Letter::plain(i), Letter::barred(i)]).collect();
    let id = FockOperator::identity(ctx)?;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for &i in &letters {
        let ai = annihilate(ctx, i)?;
        for &j in &letters {
            let cj = create(ctx, j)?;
            let mut lhs = ai.mul(&cj).add(&cj.mul(&ai).scale(C64::new(-ctx.q(), 0.0)));
            if i == j {
                lhs = lhs.add(&id.scale(C64::new(-1.0, 0.0)));
            }
            let zero = id.scale(C64::default());
            worst = worst.max(lhs.max_abs_diff_on_levels(&zero, ctx.trunc() - 1));
            cases += 1;
        }
    }
    Ok(IdentityCheck { name: "q-commutation", residual: worst, cases })
}

/// `R_{k,n}(P^(k) ⊗ P^(n-k)) = P^(n)`, column by column for `n ≤ max_n`.
pub fn r_factorization_residual(q: f64, d: usize, max_n: usize) -> Result<IdentityCheck> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for w in words_up_to(d, max_n, true) {
        let n = w.len();
        let target = p_column(q, &w);
        for k in 0..=n {
            let (left, right) = (p_column(q, &w.prefix(k)), p_column(q, &w.suffix(k)));
            let mut col: BTreeMap<Word, f64> = BTreeMap::new();
            for sigma in coset_representatives(n, k)? {
                let weight = q.powi(sigma.inversions() as i32);
                for (x, cx) in &left {
                    for (y, cy) in &right {
                        let image = Word::new(sigma.act(x.concat(y).letters()));
                        *col.entry(image).or_insert(0.0) += weight * cx * cy;
                    }
                }
            }
            for (v, c) in &target {
                worst = worst.max((col.get(v).copied().unwrap_or(0.0) - c).abs());
            }
            for (v, c) in &col {
                if !target.contains_key(v) {
                    worst = worst.max(c.abs());
                }
            }
            cases += 1;
        }
    }
    Ok(IdentityCheck { name: "r-factorization", residual: worst, cases })
}

pub fn circular_expansion_residual(ctx: &QContext, max_n: usize) -> Result<IdentityCheck> {
    let sources = words_up_to(ctx.d(), ctx.trunc(), true);
    let mut worst: f64 = 0.0;
    let words = words_up_to(ctx.d(), max_n, false);
    for w in &words {
        let lhs: OpExpr = expand_word_terms(ctx.q(), w)?.into();
        worst = worst.max(compare(ctx, &lhs, &monomial_expr(w)?, w.len(), &sources));
    }
    Ok(IdentityCheck { name: "circular-expansion", residual: worst, cases: words.len() })
}

pub fn annihilation_creation_residual(ctx: &QContext, max_len: usize) -> Result<IdentityCheck> {
    let sources = words_up_to(ctx.d(), ctx.trunc(), true);
    let words = words_up_to(ctx.d(), max_len, false);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for v in &words {
        for u in &words {
            let lhs: OpExpr = normal_order_terms(ctx.q(), v, u)?.into();
            let rhs = adjoint_product_expr(v, u);
            worst = worst.max(compare(ctx, &lhs, &rhs, v.len() + u.len(), &sources));
            cases += 1;
        }
    }
    Ok(IdentityCheck { name: "annihilation-creation", residual: worst, cases })
}

/// The one-generator q-binomial formula for `a^{*k} a^l`, `k, l ≤ max_n`.
pub fn one_variable_residual(q: f64, trunc: usize, max_n: usize) -> Result<IdentityCheck> {
    let ctx = QContext::new(q, 1, trunc)?;
    let sources = words_up_to(1, trunc, true);
    let e = Word::plain(&[1]);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for k in 0..=max_n {
        for l in 0..=max_n {
            let lhs: OpExpr = one_variable_normal_order(q, k, l)?.into();
            let v = Word::repeat(e.letters()[0], k);
            let u = Word::repeat(e.letters()[0], l);
            worst = worst.max(compare(&ctx, &lhs, &adjoint_product_expr(&v, &u), k + l, &sources));
            cases += 1;
        }
    }
    Ok(IdentityCheck { name: "one-variable-normal-order", residual: worst, cases })
}

/// `De_w Ω = e_w`.
pub fn wick_residual(ctx: &QContext, max_n: usize) -> Result<IdentityCheck> {
    let words = words_up_to(ctx.d(), max_n, false);
    let mut worst: f64 = 0.0;
    for w in &words {
        let out = OpExpr::from(wick_terms(ctx.q(), w)?).apply_vector(ctx.q(), ctx.trunc(), &FockVector::vacuum());
        worst = worst.max(out.max_abs_diff(&FockVector::basis(w.clone())));
    }
    Ok(IdentityCheck { name: "wick-vacuum", residual: worst, cases: words.len() })
}

/// `⟨x*, y*⟩_q = conj ⟨x, y⟩_q` and `x** = x` on random vectors up to `max_level`.
pub fn star_residual(q: f64, d: usize, max_level: usize, samples: usize, seed: u64) -> IdentityCheck {
    let words = words_up_to(d, max_level, true);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let (x, y) = (random_vector(&words, &mut rng), random_vector(&words, &mut rng));
        let lhs = q_inner(q, &x.star(), &y.star());
        let rhs = q_inner(q, &x, &y).conj();
        worst = worst.max((lhs - rhs).norm() / rhs.norm().max(1.0));
        worst = worst.max(x.star().star().max_abs_diff(&x));
    }
    IdentityCheck { name: "star-anti-unitarity", residual: worst, cases: samples }
}

fn level_dense(basis: &Basis, x: &FockVector, n: usize) -> Vec<C64> {
    let start = basis.level_range(n).start;
    let mut out = vec![C64::default(); basis.level_size(n)];
    for (w, c) in x.iter() {
        out[basis.index(w).expect("word in basis") - start] = *c;
    }
    out
}

/// `‖x‖` in `F_q^{⊗k} ⊗ F_q^{⊗(n-k)}` for `x` supported on level `n`.
pub fn split_norm(basis: &Basis, q: f64, k: usize, n: usize, x: &FockVector) -> f64 {
    let v = level_dense(basis, x, n);
    let pv = p_apply_split(q, basis.alphabet(), k, n, &v);
    pv.iter().zip(&v).map(|(a, b)| a * b.conj()).sum::<C64>().re.max(0.0).sqrt()
}

/// Excess of `‖(I ⊗ Φ ⊗ I)(ξ ⊗ η)‖` over `‖ξ‖ ‖η‖` with `Φ(x ⊗ y) = ⟨x, y*⟩_q`.
pub fn tensor_contraction_residual(q: f64, d: usize, samples: usize, seed: u64) -> Result<IdentityCheck> {
    let basis = Basis::new(d, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    let mut cases = 0;
    for (a, m, b) in [(0, 1, 0), (1, 1, 1), (1, 2, 1), (2, 1, 0), (0, 2, 2), (2, 2, 1)] {
        let xi_words: Vec<Word> = words_up_to(d, a + m, true).into_iter().filter(|w| w.len() == a + m).collect();
        let eta_words: Vec<Word> = words_up_to(d, m + b, true).into_iter().filter(|w| w.len() == m + b).collect();
        for _ in 0..samples {
            let xi = random_vector(&xi_words, &mut rng);
            let eta = random_vector(&eta_words, &mut rng);
            let mut zeta = FockVector::zero();
            for (w, cx) in xi.iter() {
                for (v, cy) in eta.iter() {
                    let g = gram_entry(q, &w.suffix(a), &v.prefix(m).star());
                    if g != 0.0 {
                        zeta.add_term(w.prefix(a).concat(&v.suffix(m)), cx * cy * g);
                    }
                }
            }
            let lhs = split_norm(&basis, q, a, a + b, &zeta);
            let rhs = split_norm(&basis, q, a, a + m, &xi) * split_norm(&basis, q, m, m + b, &eta);
            worst = worst.max(lhs - rhs);
            cases += 1;
        }
    }
    Ok(IdentityCheck { name: "tensor-contraction", residual: worst.max(0.0), cases })
}

/// `R*_{k,n} ξ = Σ_σ q^{inv σ} σ^{-1}(ξ)`.
pub fn r_star(q: f64, k: usize, x: &FockVector) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for (w, c) in x.iter() {
        for sigma in coset_representatives(w.len(), k)? {
            out.add_term(inverse_action(&sigma, w), c * q.powi(sigma.inversions() as i32));
        }
    }
    Ok(out)
}

/// Excess of `‖R*_{k,n} ξ‖` in the split norm over `C^{1/2} ‖ξ‖_q`, for `n ≤ max_n`.
pub fn r_star_residual(q: f64, d: usize, max_n: usize, samples: usize, seed: u64) -> Result<IdentityCheck> {
    let basis = Basis::new(d, max_n)?;
    let c = constants(q, DEFAULT_SERIES_TOL)?.c_q;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all = words_up_to(d, max_n, true);
    let mut worst = f64::NEG_INFINITY;
    let mut cases = 0;
    for n in 1..=max_n {
        let level: Vec<Word> = all.iter().filter(|w| w.len() == n).cloned().collect();
        for _ in 0..samples {
            let xi = random_vector(&level, &mut rng);
            let rhs = c.sqrt() * q_norm(q, &xi);
            for k in 0..=n {
                let lhs = split_norm(&basis, q, k, n, &r_star(q, k, &xi)?);
                worst = worst.max(lhs - rhs);
                cases += 1;
            }
        }
    }
    Ok(IdentityCheck { name: "r-star-bound", residual: worst.max(0.0), cases })
}

/// Runs every identity and inequality check.
///
/// Word lengths: expansions, Wick products and the one-generator formula up to `max_n`,
/// `R_{k,n}` up to `max_n + 1`, `(a_v)^* a_u` with `|u|, |v| < max_n`.
pub fn identity_suite(ctx: &QContext, max_n: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    if max_n == 0 {
        return Err(argument("the identity suite needs max_n >= 1"));
    }
    ctx.require_headroom(max_n)?;
    let (q, d) = (ctx.q(), ctx.d());
    Ok(vec![
        q_commutation_residual(ctx)?,
        r_factorization_residual(q, d, max_n + 1)?,
        circular_expansion_residual(ctx, max_n)?,
        annihilation_creation_residual(ctx, max_n - 1)?,
        one_variable_residual(q, ctx.trunc(), max_n)?,
        wick_residual(ctx, max_n)?,
        star_residual(q, d, 4, 8, seed),
        tensor_contraction_residual(q, d, 4, seed)?,
        r_star_residual(q, d, max_n + 1, 3, seed)?,
    ])
}
