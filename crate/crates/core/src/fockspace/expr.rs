use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::basis::Basis;
use super::context::QContext;
use super::operator::{FockOperator, OperatorKind};
use super::vector::FockVector;
use super::word::{Letter, Word};
use crate::error::Result;

/// A finite sum `Σ c_{u,v} a_u a*_v` of normal-ordered products.
///
/// Here `a_u = a_{u_1}⋯a_{u_k}` and `a*_v = a*_{v_1}⋯a*_{v_l}`; letters may be barred.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NormalOrdered {
    terms: BTreeMap<(Word, Word), C64>,
}

impl NormalOrdered {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, Word, C64)>) -> Self {
        let mut s = Self::new();
        for (u, v, c) in terms {
            s.add_term(u, v, c);
        }
        s
    }

    pub fn add_term(&mut self, u: Word, v: Word, c: C64) {
        let e = self.terms.entry((u, v)).or_default();
        *e += c;
        if *e == C64::default() {
            self.terms.retain(|_, c| *c != C64::default());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Word, C64)> {
        self.terms.iter().map(|((u, v), c)| (u, v, *c))
    }

    pub fn coefficient(&self, u: &Word, v: &Word) -> C64 {
        self.terms.get(&(u.clone(), v.clone())).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|u| + |v|` over the terms.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|(u, v)| u.len() + v.len()).max().unwrap_or(0)
    }

    pub fn scale(&self, a: C64) -> Self {
        Self::from_terms(self.terms().map(|(u, v, c)| (u.clone(), v.clone(), c * a)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (u, v, c) in other.terms() {
            s.add_term(u.clone(), v.clone(), c);
        }
        s
    }

    /// Coefficientwise distance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.add(&other.scale(C64::new(-1.0, 0.0))).terms().map(|(_, _, c)| c.norm()).fold(0.0, f64::max)
    }

    /// The q-adjoint, using `(a_u a*_v)♯ = a_{v*} a*_{u*}`.
    pub fn q_adjoint(&self) -> Self {
        Self::from_terms(self.terms().map(|(u, v, c)| (v.star(), u.star(), c.conj())))
    }

    pub fn apply_vector(&self, q: f64, trunc: usize, x: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        let mut cache: HashMap<&Word, FockVector> = HashMap::new();
        for ((u, v), c) in &self.terms {
            let y = cache.entry(v).or_insert_with(|| {
                v.letters().iter().rev().fold(x.clone(), |y, &l| y.annihilate(l, q))
            });
            let z = u.letters().iter().rev().fold(y.clone(), |z, &l| z.create(l, trunc));
            out.axpy(*c, &z);
        }
        out
    }

    pub fn apply_dense(&self, basis: &Basis, q: f64, x: &[C64]) -> Vec<C64> {
        // a*_v x for every suffix of every v, then one creation chain per u
        let mut memo: HashMap<Word, Vec<C64>> = HashMap::new();
        memo.insert(Word::empty(), x.to_vec());
        let mut by_u: BTreeMap<&Word, Vec<C64>> = BTreeMap::new();
        for ((u, v), c) in &self.terms {
            for k in (0..v.len()).rev() {
                let suffix = v.suffix(k);
                if !memo.contains_key(&suffix) {
                    let prev = &memo[&v.suffix(k + 1)];
                    let next = basis.annihilate(v.letters()[k], q, prev);
                    memo.insert(suffix, next);
                }
            }
            let y = &memo[v];
            let acc = by_u.entry(u).or_insert_with(|| basis.zeros());
            for (a, b) in acc.iter_mut().zip(y) {
                *a += c * b;
            }
        }
        let mut out = basis.zeros();
        for (u, s) in by_u {
            let z = u.letters().iter().rev().fold(s, |z, &l| basis.create(l, &z));
            for (o, v) in out.iter_mut().zip(&z) {
                *o += v;
            }
        }
        out
    }

    /// Conjugate transpose for the coefficient inner product.
    pub fn apply_adjoint_dense(&self, basis: &Basis, q: f64, x: &[C64]) -> Vec<C64> {
        let mut out = basis.zeros();
        for ((u, v), c) in &self.terms {
            let z = u.letters().iter().fold(x.to_vec(), |z, &l| basis.create_transpose(l, &z));
            let z = v.letters().iter().fold(z, |z, &l| basis.annihilate_transpose(l, q, &z));
            for (o, w) in out.iter_mut().zip(&z) {
                *o += c.conj() * w;
            }
        }
        out
    }
}

/// A lazily evaluated operator on the truncated Fock space.
///
/// Products apply right to left and every factor is compressed to the truncation, so
/// structural q-adjoints of compressions are exact.
#[derive(Debug, Clone)]
pub enum OpExpr {
    Identity,
    Create(Letter),
    Annihilate(Letter),
    /// `e^{-tN}`.
    Semigroup(f64),
    Matrix(Arc<FockOperator>),
    Scale(C64, Box<OpExpr>),
    Sum(Vec<OpExpr>),
    Product(Vec<OpExpr>),
    Normal(Arc<NormalOrdered>),
}

impl From<FockOperator> for OpExpr {
    fn from(op: FockOperator) -> Self {
        OpExpr::Matrix(Arc::new(op))
    }
}

impl From<NormalOrdered> for OpExpr {
    fn from(n: NormalOrdered) -> Self {
        OpExpr::Normal(Arc::new(n))
    }
}

impl OpExpr {
    pub fn scaled(self, a: C64) -> Self {
        OpExpr::Scale(a, Box::new(self))
    }

    pub fn apply_vector(&self, q: f64, trunc: usize, x: &FockVector) -> FockVector {
        match self {
            OpExpr::Identity => x.truncated(trunc),
            OpExpr::Create(l) => x.create(*l, trunc),
            OpExpr::Annihilate(l) => x.annihilate(*l, q).truncated(trunc),
            OpExpr::Semigroup(t) => x
                .truncated(trunc)
                .iter()
                .map(|(w, c)| (w.clone(), c * (-(w.len() as f64) * t).exp()))
                .collect(),
            OpExpr::Matrix(op) => op.apply(x),
            OpExpr::Scale(a, e) => e.apply_vector(q, trunc, x).scale(*a),
            OpExpr::Sum(es) => {
                let mut out = FockVector::zero();
                for e in es {
                    out.axpy(C64::new(1.0, 0.0), &e.apply_vector(q, trunc, x));
                }
                out
            }
            OpExpr::Product(es) => {
                es.iter().rev().fold(x.truncated(trunc), |y, e| e.apply_vector(q, trunc, &y))
            }
            OpExpr::Normal(n) => n.apply_vector(q, trunc, &x.truncated(trunc)),
        }
    }

    pub fn apply_dense(&self, basis: &Basis, q: f64, x: &[C64]) -> Vec<C64> {
        match self {
            OpExpr::Identity => x.to_vec(),
            OpExpr::Create(l) => basis.create(*l, x),
            OpExpr::Annihilate(l) => basis.annihilate(*l, q, x),
            OpExpr::Semigroup(t) => basis.semigroup(*t, x),
            OpExpr::Matrix(op) => op.apply_dense(x),
            OpExpr::Scale(a, e) => {
                let mut y = e.apply_dense(basis, q, x);
                y.iter_mut().for_each(|v| *v *= a);
                y
            }
            OpExpr::Sum(es) => {
                let mut out = basis.zeros();
                for e in es {
                    for (o, v) in out.iter_mut().zip(e.apply_dense(basis, q, x)) {
                        *o += v;
                    }
                }
                out
            }
            OpExpr::Product(es) => es.iter().rev().fold(x.to_vec(), |y, e| e.apply_dense(basis, q, &y)),
            OpExpr::Normal(n) => n.apply_dense(basis, q, x),
        }
    }

    /// Conjugate transpose for the coefficient inner product.
    pub fn apply_adjoint_dense(&self, basis: &Basis, q: f64, x: &[C64]) -> Vec<C64> {
        match self {
            OpExpr::Identity => x.to_vec(),
            OpExpr::Create(l) => basis.create_transpose(*l, x),
            OpExpr::Annihilate(l) => basis.annihilate_transpose(*l, q, x),
            OpExpr::Semigroup(t) => basis.semigroup(*t, x),
            OpExpr::Matrix(op) => op.matrix().adjoint_matvec(x),
            OpExpr::Scale(a, e) => {
                let mut y = e.apply_adjoint_dense(basis, q, x);
                y.iter_mut().for_each(|v| *v *= a.conj());
                y
            }
            OpExpr::Sum(es) => {
                let mut out = basis.zeros();
                for e in es {
                    for (o, v) in out.iter_mut().zip(e.apply_adjoint_dense(basis, q, x)) {
                        *o += v;
                    }
                }
                out
            }
            OpExpr::Product(es) => es.iter().fold(x.to_vec(), |y, e| e.apply_adjoint_dense(basis, q, &y)),
            OpExpr::Normal(n) => n.apply_adjoint_dense(basis, q, x),
        }
    }

    /// Structural q-adjoint, or `None` when a matrix factor does not carry one.
    pub fn q_adjoint(&self) -> Option<OpExpr> {
        Some(match self {
            OpExpr::Identity => OpExpr::Identity,
            OpExpr::Create(l) => OpExpr::Annihilate(*l),
            OpExpr::Annihilate(l) => OpExpr::Create(*l),
            OpExpr::Semigroup(t) => OpExpr::Semigroup(*t),
            OpExpr::Matrix(op) => OpExpr::Matrix(Arc::new(op.q_adjoint()?)),
            OpExpr::Scale(a, e) => OpExpr::Scale(a.conj(), Box::new(e.q_adjoint()?)),
            OpExpr::Sum(es) => OpExpr::Sum(es.iter().map(|e| e.q_adjoint()).collect::<Option<_>>()?),
            OpExpr::Product(es) => {
                OpExpr::Product(es.iter().rev().map(|e| e.q_adjoint()).collect::<Option<_>>()?)
            }
            OpExpr::Normal(n) => OpExpr::Normal(Arc::new(n.q_adjoint())),
        })
    }

    /// Builds the sparse matrix, column by column, together with its q-adjoint when known.
    pub fn materialize(&self, ctx: &QContext) -> Result<FockOperator> {
        let (q, trunc) = (ctx.q(), ctx.trunc());
        let m = FockOperator::from_columns(ctx, |w| self.apply_vector(q, trunc, &FockVector::basis(w.clone())))?;
        let adj = match self.q_adjoint() {
            Some(a) => Some(
                FockOperator::from_columns(ctx, |w| a.apply_vector(q, trunc, &FockVector::basis(w.clone())))?
                    .matrix()
                    .clone(),
            ),
            None => None,
        };
        Ok(FockOperator::from_parts(ctx.basis_arc()?, OperatorKind::Composite, m.matrix().clone(), adj))
    }
}
