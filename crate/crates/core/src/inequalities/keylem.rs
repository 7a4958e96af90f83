use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{BoundKind, ExperimentResult, Parameters};
use crate::combinatorics::{constants, q_factorial, DEFAULT_SERIES_TOL};
use crate::error::{argument, Result};
use crate::fockspace::{gram_entry, op_norm, NormOptions, NormalOrdered, OpExpr, QContext, Word};
use crate::moments::{circular_moment, StarWord};

/// Largest `m·n` accepted by [`moment_bound_check`]; the crossing sum runs over pairings
/// of `2mn` points.
pub const MOMENT_BOUND_BUDGET: usize = 8;

fn all_words(d: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=d).map(move |i| {
                    let mut w = w.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

/// Norm of `Σ ξ(u, v) e_u ⊗ e_v` in `F_q ⊗ F_q`.
fn split_norm_sparse(q: f64, xi: &[(Word, Word, C64)]) -> f64 {
    let mut s = C64::default();
    for (u, v, a) in xi {
        for (u2, v2, b) in xi {
            let g = gram_entry(q, u, u2) * gram_entry(q, v, v2);
            if g != 0.0 {
                s += a.conj() * b * g;
            }
        }
    }
    s.re.max(0.0).sqrt()
}

/// Random family `ξ_k ∈ H₁^{⊗k} ⊗ H₂^{⊗(n-k)}`, `k = 1..=n`, with `H₁` spanned by plain and
/// `H₂` by barred letters, returned as `Σ_k M(a_k ⊗ a*_{n-k}) ξ_k` and `max_k ‖ξ_k‖`.
pub fn keylem_family(q: f64, d: usize, n: usize, seed: u64) -> (NormalOrdered, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut op = NormalOrdered::new();
    let mut worst: f64 = 0.0;
    for k in 1..=n {
        let mut xi = Vec::new();
        for u in all_words(d, k) {
            for v in all_words(d, n - k) {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                xi.push((Word::plain(&u), Word::barred(&v), C64::new(re, im) / std::f64::consts::SQRT_2));
            }
        }
        worst = worst.max(split_norm_sparse(q, &xi));
        for (u, v, c) in xi {
            op.add_term(u, v, c);
        }
    }
    (op, worst)
}

/// `‖Σ_k M(a_k ⊗ a*_{n-k}) ξ_k‖ / (√n max_k ‖ξ_k‖)` for a random family, against `A`.
pub fn keylem_check(ctx: &QContext, n: usize, seed: u64, opts: &NormOptions) -> Result<ExperimentResult> {
    if n == 0 {
        return Err(argument("the key estimate needs n >= 1"));
    }
    ctx.require_headroom(n)?;
    let k = constants(ctx.q(), DEFAULT_SERIES_TOL)?;
    let (op, xi_norm) = keylem_family(ctx.q(), ctx.d(), n, seed);
    let est = op_norm(ctx, &OpExpr::Normal(Arc::new(op)), opts)?;
    let mut r = ExperimentResult::new(Parameters {
        q: ctx.q(),
        d: ctx.d(),
        n: Some(n),
        t: None,
        trunc: ctx.trunc(),
        seed: Some(seed),
    });
    r.observe("op_norm", est.value);
    r.observe("iterations", est.iterations as f64);
    r.observe("converged", if est.converged { 1.0 } else { 0.0 });
    r.observe("max_xi_norm", xi_norm);
    r.observe("ratio", est.value / ((n as f64).sqrt() * xi_norm));
    r.bound("upper", "ratio", BoundKind::Upper, k.a_haagerup, "key-estimate");
    if n == 1 {
        r.bound("single_level", "ratio", BoundKind::Upper, k.c_q, "product-norm");
    }
    Ok(r)
}

/// `τ((c^{*n} c^n)^m)` against `A^{2m} (n+1)^m ([n]_q!)^m`.
pub fn moment_bound_check(q: f64, m: usize, n: usize, a: f64) -> Result<ExperimentResult> {
    if m == 0 || n == 0 {
        return Err(argument("the moment bound needs m, n >= 1"));
    }
    if m * n > MOMENT_BOUND_BUDGET {
        return Err(argument(format!("m·n = {} exceeds the supported {MOMENT_BOUND_BUDGET}", m * n)));
    }
    let moment = circular_moment(q, &StarWord::pattern(m, n));
    let rhs = (a * a * (n + 1) as f64 * q_factorial(n, q)?).powi(m as i32);
    let mut r = ExperimentResult::new(Parameters { q, d: 1, n: Some(n), ..Parameters::default() });
    r.observe("m", m as f64);
    r.observe("moment", moment);
    r.bound("upper", "moment", BoundKind::Upper, rhs, "moment-bound");
    Ok(r)
}
