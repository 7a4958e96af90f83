use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::fockspace::{FockVector, Letter, Word};

/// A holomorphic polynomial `Σ α_w c_w` in the q-circular generators; words are unbarred.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct HoloPolynomial {
    coeffs: BTreeMap<Word, C64>,
}

impl HoloPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn new(terms: impl IntoIterator<Item = (Word, C64)>) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (w, c) in terms {
            if !w.is_plain() {
                return Err(argument(format!("holomorphic polynomials use unbarred words only, got {w}")));
            }
            *coeffs.entry(w).or_insert(C64::default()) += c;
        }
        coeffs.retain(|_, c| *c != C64::default());
        Ok(Self { coeffs })
    }

    /// The constant polynomial `1`.
    pub fn one() -> Self {
        Self::monomial(Word::empty()).expect("empty word is plain")
    }

    pub fn monomial(w: Word) -> Result<Self> {
        Self::new([(w, C64::new(1.0, 0.0))])
    }

    /// `c_i^n`.
    pub fn power(i: usize, n: usize) -> Self {
        Self::monomial(Word::repeat(Letter::plain(i), n)).expect("plain word")
    }

    /// Independent standard complex Gaussian coefficients on every word of `[d]^n`.
    pub fn random_homogeneous(d: usize, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = BTreeMap::new();
        let total = d.pow(n as u32);
        for idx in 0..total {
            let mut rest = idx;
            let mut gens = vec![0; n];
            for g in gens.iter_mut().rev() {
                *g = rest % d + 1;
                rest /= d;
            }
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            coeffs.insert(Word::plain(&gens), C64::new(re, im) / std::f64::consts::SQRT_2);
        }
        Self { coeffs }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, C64)> {
        self.coeffs.iter().map(|(w, c)| (w, *c))
    }

    pub fn coefficient(&self, w: &Word) -> C64 {
        self.coeffs.get(w).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(Word::len).max().unwrap_or(0)
    }

    /// `Some(n)` when every monomial has length `n`; the zero polynomial has none.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut lens = self.coeffs.keys().map(Word::len);
        let first = lens.next()?;
        lens.all(|l| l == first).then_some(first)
    }

    /// Largest generator index used.
    pub fn max_generator(&self) -> usize {
        self.coeffs.keys().map(Word::max_generator).max().unwrap_or(0)
    }

    pub fn scale(&self, a: C64) -> Self {
        Self::new(self.terms().map(|(w, c)| (w.clone(), c * a))).expect("plain words")
    }

    /// The dilation `D_t`: degree-`n` monomials scaled by `e^{-nt}`.
    pub fn dilate(&self, t: f64) -> Self {
        Self::new(self.terms().map(|(w, c)| (w.clone(), c * (-(w.len() as f64) * t).exp()))).expect("plain words")
    }

    /// `h Ω = Σ α_w e_w`.
    pub fn to_vector(&self) -> FockVector {
        self.terms().map(|(w, c)| (w.clone(), c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_barred_words() {
        assert!(HoloPolynomial::monomial(Word::barred(&[1])).is_err());
    }

    #[test]
    fn degrees() {
        let h = HoloPolynomial::new([
            (Word::plain(&[1, 2]), C64::new(1.0, 0.0)),
            (Word::plain(&[2]), C64::new(0.0, 1.0)),
        ])
        .unwrap();
        assert_eq!(h.degree(), 2);
        assert_eq!(h.homogeneous_degree(), None);
        assert_eq!(HoloPolynomial::power(1, 3).homogeneous_degree(), Some(3));
        assert_eq!(HoloPolynomial::zero().homogeneous_degree(), None);
        assert_eq!(HoloPolynomial::one().homogeneous_degree(), Some(0));
    }

    #[test]
    fn random_is_seeded_and_full() {
        let a = HoloPolynomial::random_homogeneous(2, 3, 7);
        assert_eq!(a, HoloPolynomial::random_homogeneous(2, 3, 7));
        assert_ne!(a, HoloPolynomial::random_homogeneous(2, 3, 8));
        assert_eq!(a.terms().count(), 8);
        assert_eq!(a.homogeneous_degree(), Some(3));
    }

    #[test]
    fn dilation_scales_by_degree() {
        let h = HoloPolynomial::power(1, 2).scale(C64::new(2.0, 0.0));
        let d = h.dilate(0.5);
        assert!((d.coefficient(&Word::plain(&[1, 1])) - C64::new(2.0 * (-1.0f64).exp(), 0.0)).norm() < 1e-15);
        assert!(h.dilate(0.0) == h);
    }
}
