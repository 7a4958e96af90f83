use num_complex::Complex64 as C64;

use super::{BoundKind, ExperimentResult, Parameters};
use crate::combinatorics::{constants, q_binomial, q_factorial, DEFAULT_SERIES_TOL};
use crate::error::{argument, Error, Result};
use crate::fockspace::{op_norm, q_norm, FockVector, Letter, NormOptions, QContext, Word};
use crate::qcircular::{evaluate_expr, l2_norm, HoloPolynomial};

fn parameters(ctx: &QContext, n: Option<usize>, t: Option<f64>, seed: Option<u64>) -> Parameters {
    Parameters { q: ctx.q(), d: ctx.d(), n, t, trunc: ctx.trunc(), seed }
}

fn record_norm(r: &mut ExperimentResult, est: &crate::fockspace::NormEstimate) {
    r.observe("op_norm", est.value);
    r.observe("iterations", est.iterations as f64);
    r.observe("converged", if est.converged { 1.0 } else { 0.0 });
    r.observe("norm_residual", est.residual);
}

/// `true` when `h` is a multiple of `c_i^n` for a single generator.
fn is_single_power(h: &HoloPolynomial) -> bool {
    let mut terms = h.terms();
    match (terms.next(), terms.next()) {
        (Some((w, _)), None) => w.letters().windows(2).all(|p| p[0] == p[1]),
        _ => false,
    }
}

/// `‖h‖ / ‖h‖_2` for homogeneous `h` of degree `n`, against `A'√(n+1)` and, for powers
/// of one generator, `b_q^{-1}√(n+1)`.
pub fn haagerup_ratio(ctx: &QContext, h: &HoloPolynomial, opts: &NormOptions) -> Result<ExperimentResult> {
    let n = h
        .homogeneous_degree()
        .ok_or_else(|| argument("the Haagerup ratio needs a nonzero homogeneous polynomial"))?;
    if h.max_generator() > ctx.d() {
        return Err(argument(format!("polynomial uses generator {} but d = {}", h.max_generator(), ctx.d())));
    }
    ctx.require_headroom(n)?;
    let k = constants(ctx.q(), DEFAULT_SERIES_TOL)?;
    let est = op_norm(ctx, &evaluate_expr(h), opts)?;
    let l2 = l2_norm(ctx, h);
    let mut r = ExperimentResult::new(parameters(ctx, Some(n), None, Some(opts.seed)));
    record_norm(&mut r, &est);
    r.observe("l2_norm", l2);
    r.observe("ratio", est.value / l2);
    let root = ((n + 1) as f64).sqrt();
    r.bound("upper", "ratio", BoundKind::Upper, k.a_prime * root, "strong-haagerup");
    if is_single_power(h) {
        r.bound("lower", "ratio", BoundKind::Lower, root / k.b_q, "sharpness-lower-bound");
    }
    Ok(r)
}

/// [`haagerup_ratio`] at each truncation in `truncs`, reporting the last one and the change
/// from the one before it.
pub fn haagerup_ladder(
    q: f64,
    d: usize,
    h: &HoloPolynomial,
    truncs: &[usize],
    opts: &NormOptions,
) -> Result<ExperimentResult> {
    let mut prev: Option<f64> = None;
    let mut out: Option<ExperimentResult> = None;
    let mut rungs = Vec::new();
    for &trunc in truncs {
        let ctx = QContext::new(q, d, trunc)?;
        let r = haagerup_ratio(&ctx, h, opts)?;
        let ratio = r.observed("ratio").expect("ratio observed");
        rungs.push((trunc, ratio));
        let mut r = r;
        r.convergence = prev.map(|p| (ratio - p).abs());
        prev = Some(ratio);
        out = Some(r);
    }
    let mut out = out.ok_or_else(|| argument("the truncation ladder is empty"))?;
    for (trunc, ratio) in rungs {
        out.observe(&format!("ratio_trunc_{trunc:02}"), ratio);
    }
    Ok(out)
}

/// `√(Σ_k binom(n, k)_q²)`, the value of `‖c^n ψ‖ / ‖c^n‖_2` at `ψ = ē^n / √([n]_q!)`.
pub fn binomial_witness(q: f64, n: usize) -> Result<f64> {
    let mut s = 0.0;
    for k in 0..=n {
        s += q_binomial(n, k, q)?.powi(2);
    }
    Ok(s.sqrt())
}

/// Sharpness of the `√(n+1)` growth for `c^n` with one generator.
pub fn sharpness_lower(ctx: &QContext, n: usize, opts: &NormOptions) -> Result<ExperimentResult> {
    if ctx.d() != 1 {
        return Err(argument("the sharpness experiment uses a single generator (d = 1)"));
    }
    let required = 2 * n + ctx.headroom();
    if ctx.trunc() < required {
        return Err(Error::Truncation { trunc: ctx.trunc(), required });
    }
    let q = ctx.q();
    let k = constants(q, DEFAULT_SERIES_TOL)?;
    let h = HoloPolynomial::power(1, n);
    let est = op_norm(ctx, &evaluate_expr(&h), opts)?;
    let l2 = l2_norm(ctx, &h);
    let psi = FockVector::basis(Word::repeat(Letter::barred(1), n)).scale(C64::new(1.0 / q_factorial(n, q)?.sqrt(), 0.0));
    let image = evaluate_expr(&h).apply_vector(q, ctx.trunc(), &psi);
    let mut r = ExperimentResult::new(parameters(ctx, Some(n), None, Some(opts.seed)));
    record_norm(&mut r, &est);
    r.observe("ratio", est.value / l2);
    r.observe("witness", binomial_witness(q, n)?);
    r.observe("witness_direct", q_norm(q, &image) / l2);
    let root = ((n + 1) as f64).sqrt();
    r.bound("witness_lower", "witness", BoundKind::Lower, root / k.b_q, "sharpness-lower-bound");
    let w = r.observed("witness").expect("witness");
    r.bound("ratio_over_witness", "ratio", BoundKind::Lower, w, "rayleigh-witness");
    Ok(r)
}

/// `‖D_t h‖ / ‖h‖_2` against `β/t` with `β = A'/2`, and against `A'/(1 - e^{-2t})`.
pub fn dilation_l2_linf(ctx: &QContext, h: &HoloPolynomial, t: f64, opts: &NormOptions) -> Result<ExperimentResult> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(argument(format!("dilation time must be positive, got {t}")));
    }
    if h.is_zero() {
        return Err(argument("the dilation ratio needs a nonzero polynomial"));
    }
    ctx.require_headroom(h.degree())?;
    let k = constants(ctx.q(), DEFAULT_SERIES_TOL)?;
    let est = op_norm(ctx, &evaluate_expr(&h.dilate(t)), opts)?;
    let mut r = ExperimentResult::new(parameters(ctx, Some(h.degree()), Some(t), Some(opts.seed)));
    record_norm(&mut r, &est);
    r.observe("ratio", est.value / l2_norm(ctx, h));
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
