//! Joint moments of q-circular and q-Gaussian systems from crossing-weighted pairings,
//! with the vacuum trace as an independent check.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{crossing_sum, Label};
use crate::error::{argument, Error, Result};
use crate::fockspace::{OpExpr, QContext};
use crate::qcircular::{c_expr, c_star_expr, trace, x_expr};
use crate::fockspace::Letter;

/// A word in the generators `c_i` and their adjoints `c_i*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarWord {
    letters: Vec<(usize, bool)>,
}

impl StarWord {
    /// `(generator, starred)` pairs; generators are 1-based.
    pub fn new(letters: Vec<(usize, bool)>) -> Result<Self> {
        if letters.iter().any(|&(i, _)| i == 0) {
            return Err(argument("generator indices start at 1"));
        }
        Ok(Self { letters })
    }

    /// Parses whitespace-separated tokens such as `"1* 2* 1 2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .split_whitespace()
            .map(|tok| {
                let (num, starred) = match tok.strip_suffix('*') {
                    Some(rest) => (rest, true),
                    None => (tok, false),
                };
                num.parse::<usize>()
                    .ok()
                    .filter(|&i| i > 0)
                    .map(|i| (i, starred))
                    .ok_or_else(|| argument(format!("bad star-word token {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }

    /// `((c*)^n c^n)^m` in the first generator.
    pub fn pattern(m: usize, n: usize) -> Self {
        let block = (0..n).map(|_| (1, true)).chain((0..n).map(|_| (1, false)));
        let letters = (0..m).flat_map(|_| block.clone()).collect();
        Self { letters }
    }

    pub fn letters(&self) -> &[(usize, bool)] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|&(i, _)| i).max().unwrap_or(0)
    }

    /// Star or one label per position.
    pub fn labels(&self) -> Vec<Label> {
        self.letters.iter().map(|&(_, s)| if s { Label::Star } else { Label::One }).collect()
    }

    /// The operator product, leftmost factor applied last.
    pub fn to_expr(&self) -> OpExpr {
        OpExpr::Product(
            self.letters.iter().map(|&(i, s)| if s { c_star_expr(i) } else { c_expr(i) }).collect(),
        )
    }
}

impl fmt::Display for StarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> =
            self.letters.iter().map(|&(i, s)| if s { format!("{i}*") } else { i.to_string() }).collect();
        f.write_str(&toks.join(" "))
    }
}

/// `τ(c_{i_1}^{ε_1} ⋯ c_{i_n}^{ε_n}) = Σ q^{cr(π)}` over pairings joining a `c_i*` to a `c_i`.
pub fn circular_moment(q: f64, sw: &StarWord) -> f64 {
    let l = sw.letters();
    crossing_sum(l.len(), q, |i, j| l[i].0 == l[j].0 && l[i].1 != l[j].1)
}

/// `τ(X_{i_1} ⋯ X_{i_n}) = Σ q^{cr(π)}` over pairings of equal generators.
pub fn gaussian_moment(q: f64, word: &[usize]) -> f64 {
    crossing_sum(word.len(), q, |i, j| word[i] == word[j])
}

/// The same moment from pairings and from the vacuum trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentComparison {
    pub combinatorial: f64,
    pub trace: f64,
    pub delta: f64,
}

/// Evaluates a circular moment both combinatorially and as `⟨T Ω, Ω⟩_q`.
pub fn moment_vs_trace(ctx: &QContext, sw: &StarWord) -> Result<MomentComparison> {
    if sw.max_generator() > ctx.d() {
        return Err(argument(format!("star-word uses generator {} but d = {}", sw.max_generator(), ctx.d())));
    }
    ctx.require_trunc(sw.len().div_ceil(2))?;
    let combinatorial = circular_moment(ctx.q(), sw);
    let tr: C64 = trace(ctx, &sw.to_expr());
    check_real(tr)?;
    Ok(MomentComparison { combinatorial, trace: tr.re, delta: combinatorial - tr.re })
}

/// Vacuum trace of a product of field operators `X_i = a_i + a_i*`.
pub fn gaussian_trace(ctx: &QContext, word: &[usize]) -> Result<f64> {
    if word.iter().any(|&i| i == 0 || i > ctx.d()) {
        return Err(argument(format!("generators must lie in 1..={}", ctx.d())));
    }
    ctx.require_trunc(word.len().div_ceil(2))?;
    let t = OpExpr::Product(word.iter().map(|&i| x_expr(Letter::plain(i))).collect());
    let tr = trace(ctx, &t);
    check_real(tr)?;
    Ok(tr.re)
}

fn check_real(tr: C64) -> Result<()> {
    if tr.im.abs() >= 1e-10 {
        return Err(Error::Numerical(format!("trace has imaginary part {:.3e}", tr.im)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{fuss_catalan, q_factorial};

    #[test]
    fn parse_and_display() {
        let sw = StarWord::parse("1* 2* 1 2").unwrap();
        assert_eq!(sw.letters(), &[(1, true), (2, true), (1, false), (2, false)]);
        assert_eq!(sw.to_string(), "1* 2* 1 2");
        assert!(StarWord::parse("0").is_err());
        assert!(StarWord::parse("a*").is_err());
        assert_eq!(StarWord::pattern(2, 1).to_string(), "1* 1 1* 1");
    }

    #[test]
    fn non_free_witnesses() {
        for &q in &[-0.5, 0.0, 0.5] {
            assert!((circular_moment(q, &StarWord::parse("1* 2* 1 2").unwrap()) - q).abs() < 1e-15);
            assert!((circular_moment(q, &StarWord::parse("1* 1* 1 1").unwrap()) - (1.0 + q)).abs() < 1e-15);
        }
        assert_eq!(circular_moment(0.5, &StarWord::parse("1").unwrap()), 0.0);
        assert_eq!(circular_moment(0.5, &StarWord::parse("1 1*").unwrap()), 1.0);
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_moment(0.3, &[1, 1]), 1.0);
        assert!((gaussian_moment(0.3, &[1, 1, 1, 1]) - 2.3).abs() < 1e-15);
        assert_eq!(gaussian_moment(0.3, &[1, 2, 2]), 0.0);
        let ctx = QContext::new(0.3, 2, 3).unwrap();
        let t = gaussian_trace(&ctx, &[1, 2, 1, 2, 2, 2]).unwrap();
        assert!((t - gaussian_moment(0.3, &[1, 2, 1, 2, 2, 2])).abs() < 1e-12);
    }

    #[test]
    fn pattern_moments() {
        for n in 0..5 {
            let sw = StarWord::pattern(1, n);
            assert!((circular_moment(-0.4, &sw) - q_factorial(n, -0.4).unwrap()).abs() < 1e-12);
        }
        for m in 1..=3u64 {
            for n in 1..=3u64 {
                let v = circular_moment(0.0, &StarWord::pattern(m as usize, n as usize));
                assert_eq!(v, fuss_catalan(m, n).unwrap() as f64);
            }
        }
    }

    #[test]
    fn trace_agrees() {
        let ctx = QContext::new(0.5, 2, 3).unwrap();
        for s in ["1* 2* 1 2", "1* 1* 1 1", "2 1 2* 1*", "1* 2 2* 1", "1 1*"] {
            let r = moment_vs_trace(&ctx, &StarWord::parse(s).unwrap()).unwrap();
            assert!(r.delta.abs() < 1e-12, "{s}: {r:?}");
        }
        let small = QContext::new(0.5, 2, 1).unwrap();
        assert!(moment_vs_trace(&small, &StarWord::parse("1* 2* 1 2").unwrap()).is_err());
        assert!(moment_vs_trace(&ctx, &StarWord::parse("3 3*").unwrap()).is_err());
    }
}
