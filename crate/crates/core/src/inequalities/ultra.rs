use num_complex::Complex64 as C64;

use super::{BoundKind, ExperimentResult, Parameters};
use crate::combinatorics::{constants, q_integer, DEFAULT_SERIES_TOL};
use crate::error::{argument, check_q, Result};
use crate::fockspace::{q_norm, FockVector, Letter, QContext, Word};
use crate::qcircular::c_star_expr;

/// Tail size `e^{-2Mt}` allowed when truncating the `h_t` series at degree `M`.
pub const TAIL_TOL: f64 = 1e-12;

/// Smallest degree cut `M` with `e^{-2Mt} < TAIL_TOL`.
pub fn tail_degree_cut(t: f64) -> Result<usize> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(argument(format!("time must be positive, got {t}")));
    }
    Ok((-TAIL_TOL.ln() / (2.0 * t)).floor() as usize + 1)
}

/// `ln [n]_q!` for `n = 0..=max`.
fn ln_factorials(q: f64, max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(acc);
    for n in 1..=max {
        acc += q_integer(n, q).ln();
        out.push(acc);
    }
    out
}

// Σ_k e^{-2(m+n+2k)t} binom(m+k,k) binom(n+k,k) [k]! / √([m+k]! [n+k]!), in logarithms.
fn coefficient_from_table(lf: &[f64], t: f64, m: usize, n: usize, cut: usize) -> f64 {
    let mut s = 0.0;
    let mut k = 0;
    while m + k <= cut && n + k <= cut {
        let ln = 0.5 * (lf[m + k] + lf[n + k]) - lf[m] - lf[n] - lf[k] - 2.0 * (m + n + 2 * k) as f64 * t;
        s += ln.exp();
        k += 1;
    }
    s
}

/// Coefficient of `ē^{⊗m} ⊗ e^{⊗n}` in `h*_{2t} h_{2t} Ω` with both series cut at degree `cut`.
pub fn ultra_coefficient(q: f64, t: f64, m: usize, n: usize, cut: usize) -> Result<f64> {
    check_q(q)?;
    if m > cut || n > cut {
        return Ok(0.0);
    }
    Ok(coefficient_from_table(&ln_factorials(q, cut), t, m, n, cut))
}

/// `Σ_{n≤cut} γ^n e^{⊗n} / √([n]_q!)` for one generator.
fn exponential_vector(lf: &[f64], gamma: f64, cut: usize) -> FockVector {
    (0..=cut)
        .map(|n| {
            let c = (n as f64 * gamma.ln() - 0.5 * lf[n]).exp();
            (Word::repeat(Letter::plain(1), n), C64::new(c, 0.0))
        })
        .collect()
}

/// Lower and upper estimates of `‖e^{-tN} : L² → L^∞‖` on holomorphic elements from the
/// test vector `ψ_t`, with the coefficient expansion of `h*_{2t} h_{2t} Ω` checked against
/// direct operator application.
pub fn ultracontractivity_experiment(ctx: &QContext, t: f64, degree_cut: usize) -> Result<ExperimentResult> {
    let min_cut = tail_degree_cut(t)?;
    if degree_cut < min_cut {
        return Err(argument(format!(
            "degree cut {degree_cut} leaves a tail above {TAIL_TOL:e} at t = {t}; use at least {min_cut}"
        )));
    }
    ctx.require_trunc(2 * degree_cut)?;
    let q = ctx.q();
    let trunc = ctx.trunc();
    let k = constants(q, DEFAULT_SERIES_TOL)?;

    let lf = ln_factorials(q, degree_cut);
    let psi = exponential_vector(&lf, (-t).exp(), degree_cut);
    let psi_sq = q_norm(q, &psi).powi(2);
    let psi_exact = 1.0 / (1.0 - (-2.0 * t).exp());

    // h_{2t} Ω = ψ_{2t}; apply h*_{2t} = Σ γ_m c*^m by Horner's rule.
    let y = exponential_vector(&lf, (-2.0 * t).exp(), degree_cut);
    let c_star = c_star_expr(1);
    let gamma = |m: usize| C64::new((-2.0 * m as f64 * t - 0.5 * lf[m]).exp(), 0.0);
    let mut z = y.scale(gamma(degree_cut));
    for m in (0..degree_cut).rev() {
        z = c_star.apply_vector(q, trunc, &z);
        z.axpy(gamma(m), &y);
    }

    let mut expected = FockVector::zero();
    for m in 0..=degree_cut {
        for n in 0..=degree_cut {
            let w = Word::repeat(Letter::barred(1), m).concat(&Word::repeat(Letter::plain(1), n));
            expected.add_term(w, C64::new(coefficient_from_table(&lf, t, m, n, degree_cut), 0.0));
        }
    }
    let coefficient_delta = z.max_abs_diff(&expected);
    let hh_sq = q_norm(q, &z).powi(2);

    let (mut s2, mut s4) = (0.0, 0.0);
    for n in 0..=degree_cut {
        s2 += (-2.0 * n as f64 * t).exp();
        s4 += (-4.0 * n as f64 * t).exp();
    }
    let ratio = (hh_sq / (s4 * s2)).sqrt();

    let mut r = ExperimentResult::new(Parameters {
        q,
        d: ctx.d(),
        n: Some(degree_cut),
        t: Some(t),
        trunc,
        seed: None,
    });
    r.observe("psi_norm_sq", psi_sq);
    r.observe("psi_norm_sq_analytic", psi_exact);
    r.observe("psi_delta", (psi_sq - psi_exact).abs());
    r.observe("coefficient_delta", coefficient_delta);
    r.observe("hh_norm_sq", hh_sq);
    r.observe("ratio", ratio);
    let chain = (1.0 - (-4.0 * t).exp()).powi(-4) / (k.b_q * k.b_q);
    r.bound("hh_lower", "hh_norm_sq", BoundKind::Lower, chain, "l4-norm-chain");
    r.bound("lower", "ratio", BoundKind::Lower, k.alpha() / t, "ultracontractivity-lower");
    r.bound("upper", "ratio", BoundKind::Upper, k.beta() / t, "ultracontractivity-upper");
    r.bound(
        "cauchy_schwarz_upper",
        "ratio",
        BoundKind::Upper,
        k.a_prime / (1.0 - (-2.0 * t).exp()),
        "cauchy-schwarz-upper",
    );
    Ok(r)
}
