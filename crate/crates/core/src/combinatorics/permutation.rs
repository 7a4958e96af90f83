use std::fmt;

use crate::error::{argument, Result};

/// A bijection of `{1, ..., n}` stored in one-line notation, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its 1-based images `p(1), ..., p(n)`.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(argument(format!("{images:?} is not a permutation of 1..={n}")));
            }
            seen[v - 1] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (1..=n).collect() }
    }

    /// The reversal `(n, n-1, ..., 1)`.
    pub fn reversal(n: usize) -> Self {
        Self { images: (1..=n).rev().collect() }
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Self::new(images.clone()).is_ok());
        Self { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `p(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v - 1] = i + 1;
        }
        Self { images: inv }
    }

    /// The composition `self ∘ other`, i.e. `other` is applied first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "composing permutations of different degree");
        Self {
            images: other.images.iter().map(|&j| self.images[j - 1]).collect(),
        }
    }

    /// The block sum `self × other` acting on `{1..k} ⊔ {k+1..k+m}`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let k = self.len();
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&v| v + k));
        Self { images }
    }

    /// Number of pairs `i < j` with `p(i) > p(j)`.
    pub fn inversions(&self) -> usize {
        let p = &self.images;
        let mut count = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// Left action on sequences: `π(w)_i = w_{π⁻¹(i)}`.
    pub fn act<T: Copy>(&self, w: &[T]) -> Vec<T> {
        assert_eq!(w.len(), self.len());
        let mut out = w.to_vec();
        for (i, &v) in self.images.iter().enumerate() {
            out[v - 1] = w[i];
        }
        out
    }

    /// All permutations of degree `n` in lexicographic order of their images.
    pub fn all(n: usize) -> Vec<Self> {
        fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
            if prefix.len() == used.len() {
                out.push(Permutation { images: prefix.clone() });
                return;
            }
            for v in 0..used.len() {
                if !used[v] {
                    used[v] = true;
                    prefix.push(v + 1);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Minimal-length representatives of the left cosets of `S_k × S_{n-k}` in `S_n`:
/// exactly the `σ` with `σ(1) < … < σ(k)` and `σ(k+1) < … < σ(n)`.
///
/// The list is ordered lexicographically by the set `{σ(1), …, σ(k)}`.
pub fn coset_representatives(n: usize, k: usize) -> Result<Vec<Permutation>> {
    if k > n {
        return Err(argument(format!("coset split k = {k} exceeds degree n = {n}")));
    }
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(k);
    subsets(n, k, 1, &mut chosen, &mut |first| {
        let mut images = first.to_vec();
        let mut mask = vec![false; n + 1];
        for &v in first {
            mask[v] = true;
        }
        images.extend((1..=n).filter(|&v| !mask[v]));
        out.push(Permutation::from_images_unchecked(images));
    });
    Ok(out)
}

fn subsets(n: usize, k: usize, start: usize, chosen: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if chosen.len() == k {
        f(chosen);
        return;
    }
    let remaining = k - chosen.len();
    for v in start..=n + 1 - remaining {
        chosen.push(v);
        subsets(n, k, v + 1, chosen, f);
        chosen.pop();
    }
}

/// The factorization `p = σ ∘ (τ₁ × τ₂)` with `σ` a minimal coset representative
/// for `S_k × S_{n-k}`, `τ₁ ∈ S_k` and `τ₂ ∈ S_{n-k}` (stored on `1..=n-k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetFactorization {
    pub representative: Permutation,
    pub left: Permutation,
    pub right: Permutation,
}

impl CosetFactorization {
    pub fn recompose(&self) -> Permutation {
        self.representative.compose(&self.left.direct_sum(&self.right))
    }
}

pub fn factor_coset(p: &Permutation, k: usize) -> Result<CosetFactorization> {
    let n = p.len();
    if k > n {
        return Err(argument(format!("coset split k = {k} exceeds degree n = {n}")));
    }
    let mut head: Vec<usize> = p.images[..k].to_vec();
    let mut tail: Vec<usize> = p.images[k..].to_vec();
    head.sort_unstable();
    tail.sort_unstable();
    let mut sigma_images = head;
    sigma_images.extend(tail);
    let sigma = Permutation::from_images_unchecked(sigma_images);
    let sigma_inv = sigma.inverse();
    let left = (0..k).map(|i| sigma_inv.apply(p.images[i])).collect();
    let right = (k..n).map(|i| sigma_inv.apply(p.images[i]) - k).collect();
    Ok(CosetFactorization {
        representative: sigma,
        left: Permutation::from_images_unchecked(left),
        right: Permutation::from_images_unchecked(right),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![3, 1]).is_err());
        assert!(Permutation::new(vec![]).is_ok());
    }

    #[test]
    fn inversion_counts() {
        assert_eq!(Permutation::identity(5).inversions(), 0);
        assert_eq!(perm(&[4, 6, 3, 1, 8, 2, 7, 5]).inversions(), 13);
        for n in 0..8 {
            assert_eq!(Permutation::reversal(n).inversions(), n * n.saturating_sub(1) / 2);
        }
    }

    #[test]
    fn inverse_has_same_inversions() {
        for p in Permutation::all(5) {
            assert_eq!(p.inversions(), p.inverse().inversions());
            assert_eq!(p.compose(&p.inverse()), Permutation::identity(5));
        }
    }

    #[test]
    fn reference_factorization_in_s8() {
        let p = perm(&[4, 6, 3, 1, 8, 2, 7, 5]);
        let f = factor_coset(&p, 3).unwrap();
        assert_eq!(f.representative, perm(&[3, 4, 6, 1, 2, 5, 7, 8]));
        assert_eq!(f.representative.inversions(), 7);
        assert_eq!(f.left, perm(&[2, 3, 1]));
        assert_eq!(f.left.inversions(), 2);
        assert_eq!(f.right.inversions(), 4);
        assert_eq!(f.recompose(), p);
        assert!(coset_representatives(8, 3).unwrap().contains(&f.representative));
    }

    #[test]
    fn identity_factors_trivially() {
        for k in 0..=6 {
            let f = factor_coset(&Permutation::identity(6), k).unwrap();
            assert_eq!(f.representative, Permutation::identity(6));
            assert_eq!(f.left, Permutation::identity(k));
            assert_eq!(f.right, Permutation::identity(6 - k));
        }
    }

    #[test]
    fn small_coset_lists() {
        let reps = coset_representatives(2, 1).unwrap();
        assert_eq!(reps, vec![perm(&[1, 2]), perm(&[2, 1])]);
        assert_eq!(coset_representatives(4, 0).unwrap(), vec![Permutation::identity(4)]);
        assert_eq!(coset_representatives(4, 4).unwrap(), vec![Permutation::identity(4)]);
        assert!(coset_representatives(3, 4).is_err());
        assert!(factor_coset(&Permutation::identity(3), 4).is_err());
    }

    #[test]
    fn action_matches_definition() {
        // π(w)_i = w_{π^{-1}(i)}: the letter in slot 1 moves to slot π(1).
        let p = perm(&[2, 3, 1]);
        assert_eq!(p.act(&['a', 'b', 'c']), vec!['c', 'a', 'b']);
    }
}
