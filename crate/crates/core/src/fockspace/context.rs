use std::sync::Arc;

use super::basis::Basis;
use super::gram::GramCache;
use super::word::{Letter, Word};
use crate::error::{argument, check_q, Error, Result};

/// Default number of levels kept above the degree of an object under test.
pub const DEFAULT_HEADROOM: usize = 4;

/// Global parameters of a truncated q-Fock space over `H = C^d ⊕ C^d`.
///
/// Cloning is cheap; clones share the dense basis and the Gram factor cache.
#[derive(Debug, Clone)]
pub struct QContext {
    q: f64,
    d: usize,
    trunc: usize,
    headroom: usize,
    basis: Result<Arc<Basis>>,
    gram: Arc<GramCache>,
}

impl QContext {
    pub fn new(q: f64, d: usize, trunc: usize) -> Result<Self> {
        check_q(q)?;
        if d == 0 || d > 127 {
            return Err(argument(format!("number of generators must be in 1..=127, got {d}")));
        }
        if trunc == 0 {
            return Err(argument("truncation level must be positive"));
        }
        Ok(Self {
            q,
            d,
            trunc,
            headroom: DEFAULT_HEADROOM,
            basis: Basis::new(d, trunc).map(Arc::new),
            gram: Arc::new(GramCache::new(q, d)),
        })
    }

    pub fn with_headroom(mut self, headroom: usize) -> Self {
        self.headroom = headroom;
        self
    }

    /// Same `q`, `d` and headroom at another truncation level, sharing the Gram cache.
    pub fn with_trunc(&self, trunc: usize) -> Result<Self> {
        if trunc == 0 {
            return Err(argument("truncation level must be positive"));
        }
        Ok(Self {
            trunc,
            basis: Basis::new(self.d, trunc).map(Arc::new),
            ..self.clone()
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn headroom(&self) -> usize {
        self.headroom
    }

    /// Dense indexing of the truncated basis; fails when it would be too large.
    pub fn basis(&self) -> Result<&Basis> {
        self.basis.as_deref().map_err(Clone::clone)
    }

    pub(crate) fn basis_arc(&self) -> Result<Arc<Basis>> {
        self.basis.clone()
    }

    pub(crate) fn gram(&self) -> &GramCache {
        &self.gram
    }

    pub fn check_letter(&self, l: Letter) -> Result<()> {
        if l.generator() > self.d {
            return Err(argument(format!("letter {l} is outside the alphabet for d = {}", self.d)));
        }
        Ok(())
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        w.letters().iter().try_for_each(|&l| self.check_letter(l))
    }

    pub fn check_plain_word(&self, w: &Word) -> Result<()> {
        self.check_word(w)?;
        if !w.is_plain() {
            return Err(argument(format!("word {w} contains a barred letter")));
        }
        Ok(())
    }

    pub fn require_trunc(&self, required: usize) -> Result<()> {
        if self.trunc < required {
            return Err(Error::Truncation { trunc: self.trunc, required });
        }
        Ok(())
    }

    /// Requires `trunc ≥ degree + headroom`.
    pub fn require_headroom(&self, degree: usize) -> Result<()> {
        self.require_trunc(degree + self.headroom)
    }
}
