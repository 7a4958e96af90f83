use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use num_complex::Complex64 as C64;

use super::basis::Basis;
use super::context::QContext;
use super::vector::FockVector;
use super::word::{Letter, Word};
use crate::error::{Error, Result};

/// Orbits larger than this are solved by conjugate gradients instead of Cholesky.
pub const ORBIT_DENSE_LIMIT: usize = 1500;

/// `⟨P^(n) e_w, e_v⟩ = Σ_{π(w) = v} q^{inv π}`.
pub fn gram_entry(q: f64, w: &Word, v: &Word) -> f64 {
    if w.len() != v.len() {
        return 0.0;
    }
    let mut a = w.letters().to_vec();
    let mut b = v.letters().to_vec();
    a.sort_unstable();
    b.sort_unstable();
    if a != b {
        return 0.0;
    }
    let mut memo = HashMap::new();
    gram_rec(q, w.letters(), v.letters(), &mut memo)
}

// Peels the first letter of the target: P = (I ⊗ P^(n-1)) R*_{1,n}.
fn gram_rec(q: f64, u: &[Letter], target: &[Letter], memo: &mut HashMap<Vec<Letter>, f64>) -> f64 {
    if u.len() <= 1 {
        return 1.0;
    }
    if let Some(&v) = memo.get(u) {
        return v;
    }
    let k = target.len() - u.len();
    let mut total = 0.0;
    let mut w = 1.0;
    let mut rest = Vec::with_capacity(u.len() - 1);
    let mut j = 0;
    while j < u.len() {
        if u[j] != target[k] {
            w *= q;
            j += 1;
            continue;
        }
        // every letter of a run leaves the same remainder
        let start = j;
        let mut run = 0.0;
        while j < u.len() && u[j] == target[k] {
            run += w;
            w *= q;
            j += 1;
        }
        rest.clear();
        rest.extend_from_slice(&u[..start]);
        rest.extend_from_slice(&u[start + 1..]);
        total += run * gram_rec(q, &rest, target, memo);
    }
    memo.insert(u.to_vec(), total);
    total
}

/// The column `P^(n) e_w` as a sparse map, built from `P e_w = Σ_j q^j e_{w_j} ⊗ P e_{w∖j}`.
pub fn p_column(q: f64, w: &Word) -> BTreeMap<Word, f64> {
    let mut memo = HashMap::new();
    p_column_rec(q, w, &mut memo).as_ref().clone()
}

fn p_column_rec(
    q: f64,
    w: &Word,
    memo: &mut HashMap<Word, Arc<BTreeMap<Word, f64>>>,
) -> Arc<BTreeMap<Word, f64>> {
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let mut out = BTreeMap::new();
    if w.len() <= 1 {
        out.insert(w.clone(), 1.0);
    } else {
        let mut weight = 1.0;
        for j in 0..w.len() {
            let first = w.letters()[j];
            let sub = p_column_rec(q, &w.remove(j), memo);
            for (u, c) in sub.iter() {
                *out.entry(u.prepend(first)).or_insert(0.0) += weight * c;
            }
            weight *= q;
        }
    }
    let out = Arc::new(out);
    memo.insert(w.clone(), out.clone());
    out
}

/// Applies `P^(n)` to a dense level-`n` vector over an alphabet of size `a`.
///
/// Uses `P^(n) = (I ⊗ P^(n-1)) R*_{1,n}`, which costs `O(n² a^n)`.
pub fn p_apply_level(q: f64, a: usize, n: usize, x: &[C64]) -> Vec<C64> {
    debug_assert_eq!(x.len(), a.pow(n as u32));
    if n <= 1 || q == 0.0 {
        return x.to_vec();
    }
    let block = x.len() / a;
    let mut out = vec![C64::default(); x.len()];
    let mut y = vec![C64::default(); block];
    for code in 0..a {
        y.iter_mut().for_each(|v| *v = C64::default());
        super::basis::annihilate_level(a, n, code, q, x, &mut y);
        let py = p_apply_level(q, a, n - 1, &y);
        out[code * block..(code + 1) * block].copy_from_slice(&py);
    }
    out
}

/// Applies `P^(k) ⊗ P^(n-k)` to a dense level-`n` vector.
pub fn p_apply_split(q: f64, a: usize, k: usize, n: usize, x: &[C64]) -> Vec<C64> {
    let cols = a.pow((n - k) as u32);
    let rows = a.pow(k as u32);
    let mut out = x.to_vec();
    for r in 0..rows {
        let row = p_apply_level(q, a, n - k, &out[r * cols..(r + 1) * cols]);
        out[r * cols..(r + 1) * cols].copy_from_slice(&row);
    }
    let mut col = vec![C64::default(); rows];
    for c in 0..cols {
        for r in 0..rows {
            col[r] = out[r * cols + c];
        }
        let pc = p_apply_level(q, a, k, &col);
        for r in 0..rows {
            out[r * cols + c] = pc[r];
        }
    }
    out
}

/// Applies the block-diagonal Gram operator `G = ⊕_n P^(n)` to a dense vector.
pub fn gram_apply(basis: &Basis, q: f64, x: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(x.len());
    for l in 0..=basis.trunc() {
        out.extend(p_apply_level(q, basis.alphabet(), l, &x[basis.level_range(l)]));
    }
    out
}

/// `Σ_i x_i conj(y_i)`.
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// `⟨x, y⟩_q` for dense vectors.
pub fn q_inner_dense(basis: &Basis, q: f64, x: &[C64], y: &[C64]) -> C64 {
    dot(&gram_apply(basis, q, x), y)
}

/// `⟨x, y⟩_q = Σ ⟨P x_n, y_n⟩`, linear in `x` and conjugate-linear in `y`.
pub fn q_inner(q: f64, x: &FockVector, y: &FockVector) -> C64 {
    let mut groups: HashMap<Vec<Letter>, Vec<(&Word, C64)>> = HashMap::new();
    for (w, c) in x.iter() {
        groups.entry(sorted(w)).or_default().push((w, *c));
    }
    let mut total = C64::default();
    let mut memo = HashMap::new();
    for (v, cy) in y.iter() {
        let Some(group) = groups.get(&sorted(v)) else { continue };
        memo.clear();
        for (w, cx) in group {
            total += cx * cy.conj() * gram_rec(q, w.letters(), v.letters(), &mut memo);
        }
    }
    total
}

/// The q-norm `‖x‖_q`.
pub fn q_norm(q: f64, x: &FockVector) -> f64 {
    q_inner(q, x, x).re.max(0.0).sqrt()
}

fn sorted(w: &Word) -> Vec<Letter> {
    let mut v = w.letters().to_vec();
    v.sort_unstable();
    v
}

struct OrbitFactor {
    /// Level-relative indices of the orbit words, in lexicographic order.
    members: Vec<usize>,
    chol: Cholesky<f64, Dyn>,
}

/// Cholesky factors of the Gram blocks of letter-content orbits, shared across threads.
#[derive(Default)]
pub struct GramCache {
    q: f64,
    d: usize,
    factors: Mutex<HashMap<Vec<Letter>, Arc<OrbitFactor>>>,
}

impl std::fmt::Debug for GramCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n = self.factors.lock().map(|m| m.len()).unwrap_or(0);
        f.debug_struct("GramCache").field("q", &self.q).field("cached_orbits", &n).finish()
    }
}

impl GramCache {
    pub fn new(q: f64, d: usize) -> Self {
        Self { q, d, factors: Mutex::new(HashMap::new()) }
    }

    fn factor(&self, content: &[Letter]) -> Result<Arc<OrbitFactor>> {
        if let Some(f) = self.factors.lock().expect("gram cache poisoned").get(content) {
            return Ok(f.clone());
        }
        let g = orbit_gram(self.q, content, &mut HashMap::new());
        let (words, m) = (&g.words, g.matrix.clone());
        let chol = Cholesky::new(m)
            .ok_or_else(|| Error::Numerical(format!("Gram block of orbit {content:?} is not positive definite")))?;
        let a = 2 * self.d;
        let members = words
            .iter()
            .map(|w| w.letters().iter().fold(0, |acc, l| acc * a + l.code(self.d)))
            .collect();
        let f = Arc::new(OrbitFactor { members, chol });
        self.factors.lock().expect("gram cache poisoned").insert(content.to_vec(), f.clone());
        Ok(f)
    }
}

/// The Gram block of one letter-content orbit, with words listed in increasing order.
struct OrbitGram {
    words: Vec<Word>,
    pos: HashMap<Word, usize>,
    matrix: DMatrix<f64>,
}

/// Builds `⟨P e_w, e_v⟩` on an orbit from the blocks of its sub-orbits via
/// `P e_w = Σ_j q^j e_{w_j} ⊗ P e_{w∖j}`.
fn orbit_gram(q: f64, content: &[Letter], memo: &mut HashMap<Vec<Letter>, Arc<OrbitGram>>) -> Arc<OrbitGram> {
    if let Some(g) = memo.get(content) {
        return g.clone();
    }
    let words = orbit_words(content);
    let pos: HashMap<Word, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let s = words.len();
    let n = content.len();
    let mut matrix = DMatrix::<f64>::zeros(s, s);
    if n <= 1 {
        matrix.fill_with_identity();
    } else {
        let mut distinct = content.to_vec();
        distinct.dedup();
        // per distinct first letter: the sub-orbit and where its words land after prepending
        let mut subs: HashMap<Letter, (Arc<OrbitGram>, Vec<usize>)> = HashMap::new();
        for &l in &distinct {
            let k = content.iter().position(|&c| c == l).expect("letter in content");
            let mut rest = content.to_vec();
            rest.remove(k);
            let g = orbit_gram(q, &rest, memo);
            let lift = g.words.iter().map(|v| pos[&v.prepend(l)]).collect();
            subs.insert(l, (g, lift));
        }
        for (col, w) in words.iter().enumerate() {
            let mut weight = 1.0;
            for j in 0..n {
                let (g, lift) = &subs[&w.letters()[j]];
                let sub_col = g.pos[&w.remove(j)];
                for (i, &row) in lift.iter().enumerate() {
                    matrix[(row, col)] += weight * g.matrix[(i, sub_col)];
                }
                weight *= q;
            }
        }
    }
    let g = Arc::new(OrbitGram { words, pos, matrix });
    memo.insert(content.to_vec(), g.clone());
    g
}

/// All distinct rearrangements of a sorted letter multiset, in increasing order.
fn orbit_words(content: &[Letter]) -> Vec<Word> {
    let mut cur = content.to_vec();
    let mut out = vec![Word::new(cur.clone())];
    while next_permutation(&mut cur) {
        out.push(Word::new(cur.clone()));
    }
    out
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Size of the largest letter-content orbit in level `l` over `a` letters.
fn max_orbit_size(a: usize, l: usize) -> u128 {
    let mut size: u128 = 1;
    let mut placed = 0u128;
    for i in 0..a {
        let count = (l / a + usize::from(i < l % a)) as u128;
        for c in 1..=count {
            placed += 1;
            size = size * placed / c;
        }
    }
    size
}

/// Solves `G y = b` level by level.
///
/// Small orbits use cached Cholesky factors; a level whose largest orbit exceeds
/// [`ORBIT_DENSE_LIMIT`] is solved by conjugate gradients with the fast `P^(n)` apply.
pub fn gram_solve(ctx: &QContext, b: &[C64]) -> Result<Vec<C64>> {
    let basis = ctx.basis()?;
    let q = ctx.q();
    let a = basis.alphabet();
    let mut out = Vec::with_capacity(b.len());
    for l in 0..=basis.trunc() {
        let rhs = &b[basis.level_range(l)];
        if l <= 1 || q == 0.0 {
            out.extend_from_slice(rhs);
        } else if max_orbit_size(a, l) > ORBIT_DENSE_LIMIT as u128 {
            out.extend(conjugate_gradient(|x| p_apply_level(q, a, l, x), rhs, 1e-14, 10_000)?);
        } else {
            let mut y = vec![C64::default(); rhs.len()];
            for idx in 0..basis.level_size(l) {
                let w = basis.word(basis.level_range(l).start + idx);
                let content = sorted(&w);
                if w.letters() != content.as_slice() {
                    continue;
                }
                let f = ctx.gram().factor(&content)?;
                let re = DVector::from_iterator(f.members.len(), f.members.iter().map(|&i| rhs[i].re));
                let im = DVector::from_iterator(f.members.len(), f.members.iter().map(|&i| rhs[i].im));
                let (sr, si) = (f.chol.solve(&re), f.chol.solve(&im));
                for (k, &i) in f.members.iter().enumerate() {
                    y[i] = C64::new(sr[k], si[k]);
                }
            }
            out.extend(y);
        }
    }
    Ok(out)
}

/// Conjugate gradients for a Hermitian positive definite operator.
pub fn conjugate_gradient(
    apply: impl Fn(&[C64]) -> Vec<C64>,
    b: &[C64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<C64>> {
    let bnorm = dot(b, b).re.sqrt();
    let mut x = vec![C64::default(); b.len()];
    if bnorm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r).re;
    for _ in 0..max_iter {
        if rr.sqrt() <= rel_tol * bnorm {
            return Ok(x);
        }
        let ap = apply(&p);
        let alpha = rr / dot(&ap, &p).re;
        for i in 0..x.len() {
            x[i] += p[i] * alpha;
            r[i] -= ap[i] * alpha;
        }
        let rr_new = dot(&r, &r).re;
        let beta = rr_new / rr;
        for i in 0..p.len() {
            p[i] = r[i] + p[i] * beta;
        }
        rr = rr_new;
    }
    Err(Error::Numerical(format!(
        "conjugate gradients stalled at relative residual {:.3e}",
        rr.sqrt() / bnorm
    )))
}
