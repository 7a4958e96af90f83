use std::collections::btree_map::{self, BTreeMap};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::word::{Letter, Word};

/// A finitely supported vector `Σ x_w e_w` in the algebraic Fock space.
///
/// Exact zeros are never stored.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    coeffs: BTreeMap<Word, C64>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The vacuum `Ω`.
    pub fn vacuum() -> Self {
        Self::basis(Word::empty())
    }

    pub fn basis(w: Word) -> Self {
        let mut v = Self::zero();
        v.add_term(w, C64::new(1.0, 0.0));
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, C64)>) -> Self {
        let mut v = Self::zero();
        for (w, c) in terms {
            v.add_term(w, c);
        }
        v
    }

    pub fn add_term(&mut self, w: Word, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        match self.coeffs.entry(w) {
            btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            btree_map::Entry::Occupied(mut e) => {
                let s = *e.get() + c;
                if s == C64::new(0.0, 0.0) {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn get(&self, w: &Word) -> C64 {
        self.coeffs.get(w).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &C64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest word length in the support (0 for the zero vector).
    pub fn max_level(&self) -> usize {
        self.coeffs.keys().next_back().map_or(0, Word::len)
    }

    /// Component in the tensor level `n`.
    pub fn level(&self, n: usize) -> Self {
        Self {
            coeffs: self.coeffs.iter().filter(|(w, _)| w.len() == n).map(|(w, c)| (w.clone(), *c)).collect(),
        }
    }

    /// Drops every word longer than `trunc`.
    pub fn truncated(&self, trunc: usize) -> Self {
        Self {
            coeffs: self.coeffs.iter().filter(|(w, _)| w.len() <= trunc).map(|(w, c)| (w.clone(), *c)).collect(),
        }
    }

    pub fn scale(&self, a: C64) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(w, c)| (w.clone(), a * c)))
    }

    pub fn axpy(&mut self, a: C64, x: &FockVector) {
        for (w, c) in &x.coeffs {
            self.add_term(w.clone(), a * c);
        }
    }

    pub fn add(&self, other: &FockVector) -> Self {
        let mut v = self.clone();
        v.axpy(C64::new(1.0, 0.0), other);
        v
    }

    pub fn sub(&self, other: &FockVector) -> Self {
        let mut v = self.clone();
        v.axpy(C64::new(-1.0, 0.0), other);
        v
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        self.sub(other).max_abs()
    }

    /// Euclidean norm of the coefficient vector (not the q-norm).
    pub fn euclidean_norm(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Conjugates the coefficients and reverses every word.
    pub fn star(&self) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(w, c)| (w.star(), c.conj())))
    }

    /// Creation `a(e_letter)`: prepends the letter, dropping words that exceed `trunc`.
    pub fn create(&self, letter: Letter, trunc: usize) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() < trunc)
                .map(|(w, c)| (w.prepend(letter), *c))
                .collect(),
        }
    }

    /// Annihilation `a*(e_letter)`: `Σ_j q^{j-1} δ(w_j, letter) e_{w without j}`.
    pub fn annihilate(&self, letter: Letter, q: f64) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.coeffs {
            let letters = w.letters();
            let mut weight = 1.0;
            let mut j = 0;
            while j < letters.len() {
                if letters[j] != letter {
                    weight *= q;
                    j += 1;
                    continue;
                }
                // removing any letter of a run gives the same word
                let start = j;
                let mut run = 0.0;
                while j < letters.len() && letters[j] == letter {
                    run += weight;
                    weight *= q;
                    j += 1;
                }
                out.add_term(w.remove(start), c * run);
            }
        }
        out
    }
}

impl FromIterator<(Word, C64)> for FockVector {
    fn from_iter<T: IntoIterator<Item = (Word, C64)>>(iter: T) -> Self {
        Self::from_terms(iter)
    }
}

/// Free function form of [`FockVector::star`].
pub fn star_vector(x: &FockVector) -> FockVector {
    x.star()
}
