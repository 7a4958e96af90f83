use std::ops::Range;

use num_complex::Complex64 as C64;

use super::vector::FockVector;
use super::word::{Letter, Word};
use crate::error::{Error, Result};

/// Largest truncated basis that dense routines will allocate.
pub const MAX_DENSE_DIM: usize = 1 << 24;

/// Dense indexing of the truncated basis `{e_w : |w| ≤ trunc}` over `2d` letters.
///
/// Words are ordered by length and then lexicographically, so the index of `w` is
/// the offset of its level plus its base-`2d` value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    d: usize,
    trunc: usize,
    alphabet: usize,
    powers: Vec<usize>,
    offsets: Vec<usize>,
}

impl Basis {
    pub fn new(d: usize, trunc: usize) -> Result<Self> {
        let alphabet = 2 * d;
        let dim = Self::dimension(d, trunc);
        if dim > MAX_DENSE_DIM as u128 {
            return Err(Error::TooLarge(dim));
        }
        let mut powers = Vec::with_capacity(trunc + 2);
        let mut offsets = Vec::with_capacity(trunc + 2);
        let (mut p, mut off) = (1usize, 0usize);
        for _ in 0..=trunc + 1 {
            powers.push(p);
            offsets.push(off);
            off += p;
            p = p.saturating_mul(alphabet);
        }
        Ok(Self { d, trunc, alphabet, powers, offsets })
    }

    /// Number of words of length at most `trunc` over `2d` letters.
    pub fn dimension(d: usize, trunc: usize) -> u128 {
        let a = 2 * d as u128;
        (0..=trunc as u32).map(|l| a.saturating_pow(l)).fold(0u128, u128::saturating_add)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.offsets[self.trunc + 1]
    }

    /// Number of words of length `l`.
    pub fn level_size(&self, l: usize) -> usize {
        self.powers[l]
    }

    pub fn level_range(&self, l: usize) -> Range<usize> {
        self.offsets[l]..self.offsets[l + 1]
    }

    pub fn index(&self, w: &Word) -> Option<usize> {
        if w.len() > self.trunc {
            return None;
        }
        let mut v = 0;
        for l in w.letters() {
            if l.generator() > self.d {
                return None;
            }
            v = v * self.alphabet + l.code(self.d);
        }
        Some(self.offsets[w.len()] + v)
    }

    pub fn level_of(&self, index: usize) -> usize {
        self.offsets.partition_point(|&o| o <= index) - 1
    }

    pub fn word(&self, index: usize) -> Word {
        let l = self.level_of(index);
        let mut v = index - self.offsets[l];
        let mut letters = vec![Letter::plain(1); l];
        for slot in letters.iter_mut().rev() {
            *slot = Letter::from_code(v % self.alphabet, self.d);
            v /= self.alphabet;
        }
        Word::new(letters)
    }

    pub fn zeros(&self) -> Vec<C64> {
        vec![C64::default(); self.dim()]
    }

    /// Dense coefficients; words outside the truncated basis are dropped.
    pub fn to_dense(&self, x: &FockVector) -> Vec<C64> {
        let mut out = self.zeros();
        for (w, c) in x.iter() {
            if let Some(i) = self.index(w) {
                out[i] += c;
            }
        }
        out
    }

    pub fn from_dense(&self, x: &[C64]) -> FockVector {
        x.iter()
            .enumerate()
            .filter(|(_, c)| **c != C64::default())
            .map(|(i, c)| (self.word(i), *c))
            .collect()
    }

    /// Compressed creation `a(e_letter)` on a dense vector.
    pub fn create(&self, letter: Letter, x: &[C64]) -> Vec<C64> {
        let code = letter.code(self.d);
        let mut out = self.zeros();
        for l in 0..self.trunc {
            let n = self.powers[l];
            let src = &x[self.offsets[l]..self.offsets[l] + n];
            let start = self.offsets[l + 1] + code * n;
            out[start..start + n].copy_from_slice(src);
        }
        out
    }

    /// Transpose of [`Basis::create`]: strips a leading `letter`.
    pub fn create_transpose(&self, letter: Letter, x: &[C64]) -> Vec<C64> {
        let code = letter.code(self.d);
        let mut out = self.zeros();
        for l in 0..self.trunc {
            let n = self.powers[l];
            let start = self.offsets[l + 1] + code * n;
            out[self.offsets[l]..self.offsets[l] + n].copy_from_slice(&x[start..start + n]);
        }
        out
    }

    /// Compressed annihilation `a*(e_letter)` on a dense vector.
    pub fn annihilate(&self, letter: Letter, q: f64, x: &[C64]) -> Vec<C64> {
        let code = letter.code(self.d);
        let mut out = self.zeros();
        for l in 1..=self.trunc {
            let src = &x[self.level_range(l)];
            let dst = &mut out[self.level_range(l - 1)];
            annihilate_level(self.alphabet, l, code, q, src, dst);
        }
        out
    }

    /// Transpose of [`Basis::annihilate`]: `Σ_j q^j` times insertion of `letter` at slot `j`.
    pub fn annihilate_transpose(&self, letter: Letter, q: f64, x: &[C64]) -> Vec<C64> {
        let code = letter.code(self.d);
        let a = self.alphabet;
        let mut out = self.zeros();
        for l in 1..=self.trunc {
            let src = &x[self.level_range(l - 1)];
            let dst = &mut out[self.level_range(l)];
            let mut w = 1.0;
            for j in 0..l {
                let r = self.powers[l - 1 - j];
                for hi in 0..self.powers[j] {
                    let s = &src[hi * r..hi * r + r];
                    let t0 = (hi * a + code) * r;
                    for (o, v) in dst[t0..t0 + r].iter_mut().zip(s) {
                        *o += v * w;
                    }
                }
                w *= q;
            }
        }
        out
    }

    /// `e^{-tN}`: scales level `l` by `e^{-lt}`.
    pub fn semigroup(&self, t: f64, x: &[C64]) -> Vec<C64> {
        let mut out = x.to_vec();
        for l in 1..=self.trunc {
            let s = (-(l as f64) * t).exp();
            for v in &mut out[self.level_range(l)] {
                *v *= s;
            }
        }
        out
    }
}

/// One level of annihilation: `dst[t] += Σ_j q^j src[insert(code, j, t)]`, where `src`
/// holds level `l` and `dst` level `l - 1`.
pub(crate) fn annihilate_level(a: usize, l: usize, code: usize, q: f64, src: &[C64], dst: &mut [C64]) {
    let mut w = 1.0;
    let mut hi_count = 1;
    let mut r = src.len() / a;
    for _ in 0..l {
        for hi in 0..hi_count {
            let s0 = (hi * a + code) * r;
            let d = &mut dst[hi * r..hi * r + r];
            for (o, v) in d.iter_mut().zip(&src[s0..s0 + r]) {
                *o += v * w;
            }
        }
        w *= q;
        hi_count *= a;
        r /= a;
    }
}
