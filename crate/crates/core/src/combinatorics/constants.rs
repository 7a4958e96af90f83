use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{argument, check_q, Result};

/// Default truncation tolerance for the infinite products and series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-15;

/// Above this `|q|` the products converge slowly and a warning is logged.
pub const SLOW_CONVERGENCE_Q: f64 = 0.95;

/// Scalar constants attached to a deformation parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QConstants {
    pub q: f64,
    /// `C = 1 / ∏_{m≥1} (1 - |q|^m)`.
    pub c_q: f64,
    /// `b = ∏_{i≥1} (1 + |q|^i) / (1 - |q|^i)`.
    pub b_q: f64,
    pub d1: f64,
    pub d2: f64,
    /// Smallest `A` with `C² + 2D₁ + 2√(3D₂ + A²C/2) ≤ A²`.
    pub a_haagerup: f64,
    /// `A √(2C)`, the constant in the strong Haagerup inequality.
    pub a_prime: f64,
}

impl QConstants {
    /// `A² - C² - 2D₁ - 2√(3D₂ + A²C/2)`; nonnegative exactly when `a` is admissible.
    pub fn fixed_point_slack(&self, a: f64) -> f64 {
        let c = self.c_q;
        a * a - c * c - 2.0 * self.d1 - 2.0 * (3.0 * self.d2 + a * a * c / 2.0).sqrt()
    }

    /// Lower ultracontractivity constant `1 / (4b)`.
    pub fn alpha(&self) -> f64 {
        1.0 / (4.0 * self.b_q)
    }

    /// Upper ultracontractivity constant `A' / 2`.
    pub fn beta(&self) -> f64 {
        self.a_prime / 2.0
    }
}

/// Sums `term(k)` for `k = start, start+1, …` until a term adds less than `tol`.
fn series(start: u32, tol: f64, term: impl Fn(u32) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut k = start;
    loop {
        let t = term(k);
        sum += t;
        if t.abs() < tol {
            return sum;
        }
        k += 1;
    }
}

/// Multiplies `factor(k)` for `k = 1, 2, …` until the relative change is below `tol`.
fn product(tol: f64, factor: impl Fn(u32) -> f64) -> f64 {
    let mut prod = 1.0;
    let mut k = 1;
    loop {
        let f = factor(k);
        prod *= f;
        if (f - 1.0).abs() < tol {
            return prod;
        }
        k += 1;
    }
}

/// `x^k` with the convention `0^0 = 1`.
fn pow(x: f64, k: u32) -> f64 {
    if k == 0 {
        1.0
    } else {
        x.powi(k as i32)
    }
}

pub fn constants(q: f64, tol: f64) -> Result<QConstants> {
    check_q(q)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(argument(format!("series tolerance must be positive, got {tol}")));
    }
    let r = q.abs();
    if r >= SLOW_CONVERGENCE_Q {
        warn!("|q| = {r} is close to 1; series for the constants converge slowly");
    }

    let c = 1.0 / product(tol, |m| 1.0 - pow(r, m));
    let b = product(tol, |i| (1.0 + pow(r, i)) / (1.0 - pow(r, i)));
    let geometric_tail = series(1, tol, |l| pow(r, l));
    let gaussian_tail = series(1, tol, |k| pow(r, 2 * k * k));
    let theta = series(0, tol, |k| pow(r, k * k));
    let geometric = series(0, tol, |k| pow(r, k));

    let d1 = c * c * geometric_tail * gaussian_tail.sqrt();
    let d2 = c.powi(5) * theta * theta * geometric * geometric;

    // Squaring A² - K = 2√(3D₂ + A²C/2) gives a quadratic in A² whose larger root is
    // the minimal admissible value (it satisfies A² ≥ K, so no root is spurious).
    let k = c * c + 2.0 * d1;
    let a_sq = k + c + (2.0 * k * c + c * c + 12.0 * d2).sqrt();
    let a = a_sq.sqrt();

    Ok(QConstants {
        q,
        c_q: c,
        b_q: b,
        d1,
        d2,
        a_haagerup: a,
        a_prime: a * (2.0 * c).sqrt(),
    })
}
