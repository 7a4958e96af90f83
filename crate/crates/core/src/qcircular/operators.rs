use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::polynomial::HoloPolynomial;
use crate::combinatorics::{coset_representatives, q_binomial, q_factorial, Permutation};
use crate::error::{argument, Result};
use crate::fockspace::{
    annihilate, create, gram_entry, q_norm, FockOperator, FockVector, Letter, NormalOrdered, OpExpr, QContext, Word,
};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// `σ^{-1}(w)`, the word with letters `w_{σ(1)} ⋯ w_{σ(n)}`.
pub(crate) fn inverse_action(sigma: &Permutation, w: &Word) -> Word {
    Word::new(sigma.images().iter().map(|&j| w.letters()[j - 1]).collect())
}

/// `c_i = a_i + a*_ī`.
pub fn c_expr(i: usize) -> OpExpr {
    OpExpr::Sum(vec![OpExpr::Create(Letter::plain(i)), OpExpr::Annihilate(Letter::barred(i))])
}

/// `c_i^♯ = a*_i + a_ī`, the q-adjoint of [`c_expr`].
pub fn c_star_expr(i: usize) -> OpExpr {
    OpExpr::Sum(vec![OpExpr::Annihilate(Letter::plain(i)), OpExpr::Create(Letter::barred(i))])
}

/// `X = a + a*` for one letter.
pub fn x_expr(letter: Letter) -> OpExpr {
    OpExpr::Sum(vec![OpExpr::Create(letter), OpExpr::Annihilate(letter)])
}

pub fn c_op(ctx: &QContext, i: usize) -> Result<FockOperator> {
    Ok(create(ctx, Letter::plain(i))?.add(&annihilate(ctx, Letter::barred(i))?))
}

pub fn x_op(ctx: &QContext, letter: Letter) -> Result<FockOperator> {
    Ok(create(ctx, letter)?.add(&annihilate(ctx, letter)?))
}

/// `c_w = c_{w_1} ⋯ c_{w_n}` as a lazy product.
pub fn monomial_expr(w: &Word) -> Result<OpExpr> {
    if !w.is_plain() {
        return Err(argument(format!("monomials take unbarred words, got {w}")));
    }
    Ok(OpExpr::Product(w.letters().iter().map(|l| c_expr(l.generator())).collect()))
}

pub fn monomial(ctx: &QContext, w: &Word) -> Result<FockOperator> {
    ctx.check_plain_word(w)?;
    let mut out = FockOperator::identity(ctx)?;
    for l in w.letters().iter().rev() {
        out = c_op(ctx, l.generator())?.mul(&out);
    }
    Ok(out)
}

/// `h(c_1, …, c_d)` as a lazy expression, nested along common prefixes.
pub fn evaluate_expr(h: &HoloPolynomial) -> OpExpr {
    fn nest(terms: Vec<(&[Letter], C64)>) -> OpExpr {
        let mut constant = C64::default();
        let mut groups: BTreeMap<Letter, Vec<(&[Letter], C64)>> = BTreeMap::new();
        for (w, c) in terms {
            match w.split_first() {
                None => constant += c,
                Some((first, rest)) => groups.entry(*first).or_default().push((rest, c)),
            }
        }
        let mut parts = Vec::new();
        if constant != C64::default() {
            parts.push(OpExpr::Identity.scaled(constant));
        }
        for (l, g) in groups {
            parts.push(OpExpr::Product(vec![c_expr(l.generator()), nest(g)]));
        }
        if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            OpExpr::Sum(parts)
        }
    }
    nest(h.terms().map(|(w, c)| (w.letters(), c)).collect())
}

fn check_poly(ctx: &QContext, h: &HoloPolynomial) -> Result<()> {
    if h.max_generator() > ctx.d() {
        return Err(argument(format!("polynomial uses generator {} but d = {}", h.max_generator(), ctx.d())));
    }
    Ok(())
}

pub fn evaluate(ctx: &QContext, h: &HoloPolynomial) -> Result<FockOperator> {
    check_poly(ctx, h)?;
    let mut out = FockOperator::identity(ctx)?.scale(C64::default());
    for (w, c) in h.terms() {
        out = out.add(&monomial(ctx, w)?.scale(c));
    }
    Ok(out)
}

/// Normal-ordered form of `c_w`:
/// `Σ_k Σ_σ q^{inv σ} a_{σ^{-1}(w)_{≤k}} a*_{bar(σ^{-1}(w)_{>k})}` over coset representatives.
pub fn expand_word_terms(q: f64, w: &Word) -> Result<NormalOrdered> {
    if !w.is_plain() {
        return Err(argument(format!("expansion takes an unbarred word, got {w}")));
    }
    split_sum(q, w, true)
}

/// The q-Wick product `De_w(X_1, …, X_d)`, the same sum without bars.
pub fn wick_terms(q: f64, w: &Word) -> Result<NormalOrdered> {
    if !w.is_plain() {
        return Err(argument(format!("Wick products take an unbarred word, got {w}")));
    }
    split_sum(q, w, false)
}

fn split_sum(q: f64, w: &Word, barred: bool) -> Result<NormalOrdered> {
    let n = w.len();
    let mut out = NormalOrdered::new();
    for k in 0..=n {
        for sigma in coset_representatives(n, k)? {
            let p = inverse_action(&sigma, w);
            let tail = if barred { p.suffix(k).bar() } else { p.suffix(k) };
            out.add_term(p.prefix(k), tail, ONE * q.powi(sigma.inversions() as i32));
        }
    }
    Ok(out)
}

pub fn expand_word(ctx: &QContext, w: &Word) -> Result<FockOperator> {
    ctx.check_plain_word(w)?;
    OpExpr::from(expand_word_terms(ctx.q(), w)?).materialize(ctx)
}

pub fn wick_polynomial(ctx: &QContext, w: &Word) -> Result<FockOperator> {
    ctx.check_plain_word(w)?;
    OpExpr::from(wick_terms(ctx.q(), w)?).materialize(ctx)
}

/// Normal-ordered form of `(a_v)^* a_u`, with `|v| = k`, `|u| = l`:
///
/// `Σ_m q^{(k-m)(l-m)} Σ_{π_1, π_2} q^{inv π_1 + inv π_2} ⟨P e_{[π_1^{-1}(v*)_{>k-m}]*}, e_{π_2^{-1}(u)_{≤m}}⟩
/// a_{π_2^{-1}(u)_{>m}} a*_{π_1^{-1}(v*)_{≤k-m}}`.
pub fn normal_order_terms(q: f64, v: &Word, u: &Word) -> Result<NormalOrdered> {
    if !v.is_plain() || !u.is_plain() {
        return Err(argument(format!("normal ordering takes unbarred words, got {v} and {u}")));
    }
    let (k, l) = (v.len(), u.len());
    let vs = v.star();
    let mut out = NormalOrdered::new();
    for m in 0..=k.min(l) {
        let outer = q.powi(((k - m) * (l - m)) as i32);
        let lefts: Vec<(Word, Word, f64)> = coset_representatives(k, k - m)?
            .iter()
            .map(|p1| {
                let w = inverse_action(p1, &vs);
                (w.prefix(k - m), w.suffix(k - m).star(), q.powi(p1.inversions() as i32))
            })
            .collect();
        for p2 in coset_representatives(l, m)? {
            let w = inverse_action(&p2, u);
            let (contract, rest) = (w.prefix(m), w.suffix(m));
            let w2 = q.powi(p2.inversions() as i32);
            for (keep, paired, w1) in &lefts {
                let g = gram_entry(q, paired, &contract);
                if g != 0.0 {
                    out.add_term(rest.clone(), keep.clone(), ONE * (outer * w1 * w2 * g));
                }
            }
        }
    }
    Ok(out)
}

pub fn normal_order(ctx: &QContext, v: &Word, u: &Word) -> Result<FockOperator> {
    ctx.check_plain_word(v)?;
    ctx.check_plain_word(u)?;
    OpExpr::from(normal_order_terms(ctx.q(), v, u)?).materialize(ctx)
}

/// The direct product `(a_v)^* a_u = a*_{v_k} ⋯ a*_{v_1} a_{u_1} ⋯ a_{u_l}`.
pub fn adjoint_product_expr(v: &Word, u: &Word) -> OpExpr {
    let mut factors: Vec<OpExpr> = v.letters().iter().rev().map(|&l| OpExpr::Annihilate(l)).collect();
    factors.extend(u.letters().iter().map(|&l| OpExpr::Create(l)));
    OpExpr::Product(factors)
}

/// One generator: `a^{*k} a^l = Σ_m q^{(k-m)(l-m)} binom(k, k-m)_q binom(l, m)_q [m]_q! a^{l-m} a^{*(k-m)}`.
pub fn one_variable_normal_order(q: f64, k: usize, l: usize) -> Result<NormalOrdered> {
    let e = Letter::plain(1);
    let mut out = NormalOrdered::new();
    for m in 0..=k.min(l) {
        let c = q.powi(((k - m) * (l - m)) as i32) * q_binomial(k, k - m, q)? * q_binomial(l, m, q)? * q_factorial(m, q)?;
        out.add_term(Word::repeat(e, l - m), Word::repeat(e, k - m), ONE * c);
    }
    Ok(out)
}

/// `‖h‖_2 = ‖h Ω‖_q`.
pub fn l2_norm(ctx: &QContext, h: &HoloPolynomial) -> f64 {
    q_norm(ctx.q(), &h.to_vector())
}

/// `τ(T) = ⟨T Ω, Ω⟩_q`, evaluated on sparse vectors.
///
/// Exact when the truncation is at least half the length of every word in `T`.
pub fn trace(ctx: &QContext, t: &OpExpr) -> C64 {
    t.apply_vector(ctx.q(), ctx.trunc(), &FockVector::vacuum()).get(&Word::empty())
}
