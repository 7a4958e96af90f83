use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::basis::Basis;
use super::context::QContext;
use super::vector::FockVector;
use super::word::{Letter, Word};
use crate::combinatorics::coset_representatives;
use crate::error::{argument, Result};

/// Square sparse complex matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    pub fn zero(n: usize) -> Self {
        Self { n, row_ptr: vec![0; n + 1], cols: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(vec![C64::new(1.0, 0.0); n])
    }

    pub fn diagonal(diag: Vec<C64>) -> Self {
        let n = diag.len();
        Self { n, row_ptr: (0..=n).collect(), cols: (0..n).collect(), vals: diag }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates and dropping zeros.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, C64)>) -> Self {
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<C64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside a {n}x{n} matrix");
            if last == Some((r, c)) {
                *vals.last_mut().expect("nonempty") += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }.pruned()
    }

    fn pruned(self) -> Self {
        if self.vals.iter().all(|v| *v != C64::default()) {
            return self;
        }
        let mut row_ptr = vec![0; self.n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.vals[k] != C64::default() {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                }
            }
            row_ptr[r + 1] = cols.len();
        }
        Self { n: self.n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => C64::default(),
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.vals[k] * x[self.cols[k]])
                    .sum()
            })
            .collect()
    }

    /// `A^† x` without forming the transpose.
    pub fn adjoint_matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::default(); self.n];
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out[self.cols[k]] += self.vals[k].conj() * x[r];
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.n, self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect())
    }

    pub fn scale(&self, a: C64) -> Self {
        let mut m = self.clone();
        m.vals.iter_mut().for_each(|v| *v *= a);
        m.pruned()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_triplets(self.n, self.triplets().chain(other.triplets()).collect())
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut acc = vec![C64::default(); self.n];
        let mut mark = vec![false; self.n];
        let mut touched = Vec::new();
        let mut row_ptr = vec![0; self.n + 1];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let (mid, a) = (self.cols[k], self.vals[k]);
                for kk in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    let c = other.cols[kk];
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * other.vals[kk];
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if acc[c] != C64::default() {
                    cols.push(c);
                    vals.push(acc[c]);
                }
                acc[c] = C64::default();
                mark[c] = false;
            }
            touched.clear();
            row_ptr[r + 1] = cols.len();
        }
        Self { n: self.n, row_ptr, cols, vals }
    }

    /// Dense row-major copy of the block `rows × cols`.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Vec<Vec<C64>> {
        let mut out = vec![vec![C64::default(); cols.len()]; rows.len()];
        for (i, r) in rows.clone().enumerate() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[k];
                if cols.contains(&c) {
                    out[i][c - cols.start] = self.vals[k];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.add(&other.scale(C64::new(-1.0, 0.0))).vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// What an operator was built as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    PrimitiveCreation,
    PrimitiveAnnihilation,
    Composite,
}

/// A sparse operator on the truncated Fock space.
///
/// Operators built from creations and annihilations also carry their adjoint with
/// respect to the q-inner product, which sums, products and scalings preserve.
#[derive(Debug, Clone)]
pub struct FockOperator {
    basis: Arc<Basis>,
    kind: OperatorKind,
    matrix: Csr,
    q_adjoint: Option<Arc<Csr>>,
}

impl FockOperator {
    pub fn from_parts(basis: Arc<Basis>, kind: OperatorKind, matrix: Csr, q_adjoint: Option<Csr>) -> Self {
        assert_eq!(matrix.dim(), basis.dim());
        Self { basis, kind, matrix, q_adjoint: q_adjoint.map(Arc::new) }
    }

    /// Builds an operator column by column from its action on basis words.
    pub fn from_columns(ctx: &QContext, mut column: impl FnMut(&Word) -> FockVector) -> Result<Self> {
        let basis = ctx.basis_arc()?;
        let mut t = Vec::new();
        for j in 0..basis.dim() {
            for (w, c) in column(&basis.word(j)).iter() {
                if let Some(i) = basis.index(w) {
                    t.push((i, j, *c));
                }
            }
        }
        let m = Csr::from_triplets(basis.dim(), t);
        Ok(Self::from_parts(basis, OperatorKind::Composite, m, None))
    }

    pub fn identity(ctx: &QContext) -> Result<Self> {
        let basis = ctx.basis_arc()?;
        let m = Csr::identity(basis.dim());
        Ok(Self::from_parts(basis, OperatorKind::Composite, m.clone(), Some(m)))
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &Csr {
        &self.matrix
    }

    pub fn has_q_adjoint(&self) -> bool {
        self.q_adjoint.is_some()
    }

    /// The adjoint for the q-inner product, when known structurally.
    pub fn q_adjoint(&self) -> Option<Self> {
        self.q_adjoint.as_ref().map(|adj| Self {
            basis: self.basis.clone(),
            kind: match self.kind {
                OperatorKind::PrimitiveCreation => OperatorKind::PrimitiveAnnihilation,
                OperatorKind::PrimitiveAnnihilation => OperatorKind::PrimitiveCreation,
                OperatorKind::Composite => OperatorKind::Composite,
            },
            matrix: adj.as_ref().clone(),
            q_adjoint: Some(Arc::new(self.matrix.clone())),
        })
    }

    /// Conjugate transpose for the coefficient (Euclidean) inner product.
    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            kind: OperatorKind::Composite,
            matrix: self.matrix.adjoint(),
            q_adjoint: None,
        }
    }

    pub fn entry(&self, row: &Word, col: &Word) -> C64 {
        match (self.basis.index(row), self.basis.index(col)) {
            (Some(r), Some(c)) => self.matrix.get(r, c),
            _ => C64::default(),
        }
    }

    pub fn apply_dense(&self, x: &[C64]) -> Vec<C64> {
        self.matrix.matvec(x)
    }

    pub fn apply(&self, x: &FockVector) -> FockVector {
        self.basis.from_dense(&self.matrix.matvec(&self.basis.to_dense(x)))
    }

    pub fn column(&self, w: &Word) -> FockVector {
        self.apply(&FockVector::basis(w.clone()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let q_adjoint = match (&self.q_adjoint, &other.q_adjoint) {
            (Some(a), Some(b)) => Some(Arc::new(b.mul(a))),
            _ => None,
        };
        Self {
            basis: self.basis.clone(),
            kind: OperatorKind::Composite,
            matrix: self.matrix.mul(&other.matrix),
            q_adjoint,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let q_adjoint = match (&self.q_adjoint, &other.q_adjoint) {
            (Some(a), Some(b)) => Some(Arc::new(a.add(b))),
            _ => None,
        };
        Self {
            basis: self.basis.clone(),
            kind: OperatorKind::Composite,
            matrix: self.matrix.add(&other.matrix),
            q_adjoint,
        }
    }

    pub fn scale(&self, a: C64) -> Self {
        Self {
            basis: self.basis.clone(),
            kind: OperatorKind::Composite,
            matrix: self.matrix.scale(a),
            q_adjoint: self.q_adjoint.as_ref().map(|m| Arc::new(m.scale(a.conj()))),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Largest entry difference restricted to the columns of words of length at most `max_level`.
    pub fn max_abs_diff_on_levels(&self, other: &Self, max_level: usize) -> f64 {
        let end = self.basis.level_range(max_level.min(self.basis.trunc())).end;
        let d = self.matrix.add(&other.matrix.scale(C64::new(-1.0, 0.0)));
        d.triplets().filter(|&(_, c, _)| c < end).map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }
}

fn csr_from_dense_map(basis: &Basis, f: impl Fn(&[C64]) -> Vec<C64>) -> Csr {
    let n = basis.dim();
    let mut t = Vec::new();
    let mut e = basis.zeros();
    for j in 0..n {
        e[j] = C64::new(1.0, 0.0);
        for (i, v) in f(&e).into_iter().enumerate() {
            if v != C64::default() {
                t.push((i, j, v));
            }
        }
        e[j] = C64::default();
    }
    Csr::from_triplets(n, t)
}

fn creation_csr(basis: &Basis, letter: Letter) -> Csr {
    let code = letter.code(basis.d());
    let mut t = Vec::new();
    for l in 0..basis.trunc() {
        let n = basis.level_size(l);
        for i in 0..n {
            let src = basis.level_range(l).start + i;
            t.push((basis.level_range(l + 1).start + code * n + i, src, C64::new(1.0, 0.0)));
        }
    }
    Csr::from_triplets(basis.dim(), t)
}

/// Creation `a(e_letter)`, compressed to the truncation.
pub fn create(ctx: &QContext, letter: Letter) -> Result<FockOperator> {
    ctx.check_letter(letter)?;
    let basis = ctx.basis_arc()?;
    let a = creation_csr(&basis, letter);
    let adj = annihilation_csr(&basis, letter, ctx.q());
    Ok(FockOperator::from_parts(basis, OperatorKind::PrimitiveCreation, a, Some(adj)))
}

fn annihilation_csr(basis: &Basis, letter: Letter, q: f64) -> Csr {
    let mut t = Vec::new();
    for j in 0..basis.dim() {
        let w = basis.word(j);
        let mut weight = 1.0;
        for (k, &l) in w.letters().iter().enumerate() {
            if l == letter {
                let i = basis.index(&w.remove(k)).expect("shorter word is in the basis");
                t.push((i, j, C64::new(weight, 0.0)));
            }
            weight *= q;
        }
    }
    Csr::from_triplets(basis.dim(), t)
}

/// Annihilation `a*(e_letter)`: `Σ_k q^{k-1} ⟨η_k, e_letter⟩` contractions.
pub fn annihilate(ctx: &QContext, letter: Letter) -> Result<FockOperator> {
    ctx.check_letter(letter)?;
    let basis = ctx.basis_arc()?;
    let m = annihilation_csr(&basis, letter, ctx.q());
    let adj = creation_csr(&basis, letter);
    Ok(FockOperator::from_parts(basis, OperatorKind::PrimitiveAnnihilation, m, Some(adj)))
}

/// `e^{-tN}`, scaling level-`n` words by `e^{-nt}`.
pub fn number_semigroup(ctx: &QContext, t: f64) -> Result<FockOperator> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(argument(format!("semigroup time must be nonnegative, got {t}")));
    }
    let basis = ctx.basis_arc()?;
    let diag = (0..basis.dim())
        .map(|i| C64::new((-(basis.level_of(i) as f64) * t).exp(), 0.0))
        .collect();
    let m = Csr::diagonal(diag);
    Ok(FockOperator::from_parts(basis, OperatorKind::Composite, m.clone(), Some(m)))
}

fn check_level(ctx: &QContext, n: usize) -> Result<()> {
    if n > ctx.trunc() {
        return Err(argument(format!("level {n} exceeds the truncation {}", ctx.trunc())));
    }
    Ok(())
}

/// The symmetrizer `P^(n)` on level `n` (zero on the other levels).
///
/// Columns come from `P^(n) = (I ⊗ P^(n-1)) R*_{1,n}`; the permutation sum is never formed.
pub fn p_matrix(ctx: &QContext, n: usize) -> Result<FockOperator> {
    check_level(ctx, n)?;
    let basis = ctx.basis_arc()?;
    let q = ctx.q();
    let a = basis.alphabet();
    let range = basis.level_range(n);
    let m = csr_from_dense_map(&basis, |x| {
        let mut out = vec![C64::default(); x.len()];
        let px = super::gram::p_apply_level(q, a, n, &x[range.clone()]);
        out[range.clone()].copy_from_slice(&px);
        out
    });
    Ok(FockOperator::from_parts(basis, OperatorKind::Composite, m.clone(), None))
}

/// `R_{k,n} = Σ_σ q^{inv σ} σ` over minimal coset representatives of `S_k × S_{n-k}`.
pub fn r_matrix(ctx: &QContext, k: usize, n: usize) -> Result<FockOperator> {
    check_level(ctx, n)?;
    if k > n {
        return Err(argument(format!("R_(k,n) needs k <= n, got k = {k}, n = {n}")));
    }
    let basis = ctx.basis_arc()?;
    let q = ctx.q();
    let reps = coset_representatives(n, k)?;
    let mut t = Vec::new();
    for j in basis.level_range(n) {
        let w = basis.word(j);
        for s in &reps {
            let image = Word::new(s.act(w.letters()));
            let i = basis.index(&image).expect("permuted word is in the basis");
            t.push((i, j, C64::new(q.powi(s.inversions() as i32), 0.0)));
        }
    }
    let m = Csr::from_triplets(basis.dim(), t);
    Ok(FockOperator::from_parts(basis, OperatorKind::Composite, m, None))
}
