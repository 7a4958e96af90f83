use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};

/// Vertex tag of a star/one labelled point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Star,
    One,
}

/// A perfect matching of vertices `1..=2m` that pairs every star with a one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPartition {
    /// Pairs `(i, j)` with `i < j`, 1-based, sorted by left endpoint.
    pairs: Vec<(usize, usize)>,
    labels: Vec<Label>,
}

impl PairPartition {
    pub fn new(mut pairs: Vec<(usize, usize)>, labels: Vec<Label>) -> Result<Self> {
        let n = labels.len();
        let mut covered = vec![false; n];
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
            let (i, j) = *p;
            if i == 0 || j > n || i == j || covered[i - 1] || covered[j - 1] {
                return Err(argument(format!("pair {p:?} is not valid on {n} vertices")));
            }
            if labels[i - 1] == labels[j - 1] {
                return Err(argument(format!("pair {p:?} joins two equal labels")));
            }
            covered[i - 1] = true;
            covered[j - 1] = true;
        }
        if covered.iter().any(|c| !c) {
            return Err(argument("pairs do not cover every vertex"));
        }
        pairs.sort_unstable();
        Ok(Self { pairs, labels })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Number of pairs `(a, b), (c, d)` with `a < c < b < d`.
    pub fn crossings(&self) -> usize {
        let p = &self.pairs;
        let mut count = 0;
        for (x, &(_, b)) in p.iter().enumerate() {
            for &(c, d) in &p[x + 1..] {
                if c < b && b < d {
                    count += 1;
                }
            }
        }
        count
    }
}

pub fn crossings(p: &PairPartition) -> usize {
    p.crossings()
}

/// Visits every perfect matching of `n` vertices whose pairs satisfy `compatible(i, j)`
/// (0-based, `i < j`), passing the partner table and the crossing number.
///
/// Matchings are produced depth-first by pairing the leftmost free vertex, so the
/// order is deterministic. Returns the number of matchings visited.
pub fn for_each_matching(
    n: usize,
    compatible: impl Fn(usize, usize) -> bool,
    mut visit: impl FnMut(&[usize], usize),
) -> usize {
    if n % 2 == 1 {
        return 0;
    }
    let mut partner = vec![usize::MAX; n];
    let mut count = 0;
    rec(&mut partner, 0, 0, &compatible, &mut visit, &mut count);
    count
}

fn rec(
    partner: &mut [usize],
    from: usize,
    cr: usize,
    compatible: &impl Fn(usize, usize) -> bool,
    visit: &mut impl FnMut(&[usize], usize),
    count: &mut usize,
) {
    let Some(i) = (from..partner.len()).find(|&i| partner[i] == usize::MAX) else {
        *count += 1;
        visit(partner, cr);
        return;
    };
    // Every vertex left of i is matched, so a matched vertex strictly between i and j is
    // the right end of an earlier pair that starts before i: each one is a crossing.
    let mut between = 0;
    for j in i + 1..partner.len() {
        if partner[j] != usize::MAX {
            between += 1;
            continue;
        }
        if compatible(i, j) {
            partner[i] = j;
            partner[j] = i;
            rec(partner, i + 1, cr + between, compatible, visit, count);
            partner[i] = usize::MAX;
            partner[j] = usize::MAX;
        }
    }
}

/// Sum of `q^{cr(π)}` over the matchings accepted by `compatible`, with `0^0 = 1`.
pub fn crossing_sum(n: usize, q: f64, compatible: impl Fn(usize, usize) -> bool) -> f64 {
    let mut total = 0.0;
    for_each_matching(n, compatible, |_, cr| total += q.powi(cr as i32));
    total
}

fn check_labels(labels: &[Label]) -> Result<()> {
    let stars = labels.iter().filter(|&&l| l == Label::Star).count();
    if labels.len() % 2 == 1 || 2 * stars != labels.len() {
        return Err(argument(format!(
            "labels must contain as many stars as ones, got {stars} stars out of {}",
            labels.len()
        )));
    }
    Ok(())
}

/// All star-one pairings of `labels`, in depth-first order.
pub fn enumerate_pairings(labels: &[Label]) -> Result<Vec<PairPartition>> {
    check_labels(labels)?;
    let mut out = Vec::new();
    for_each_matching(
        labels.len(),
        |i, j| labels[i] != labels[j],
        |partner, _| {
            let pairs = partner
                .iter()
                .enumerate()
                .filter(|&(i, &j)| i < j)
                .map(|(i, &j)| (i + 1, j + 1))
                .collect();
            out.push(PairPartition { pairs, labels: labels.to_vec() });
        },
    );
    Ok(out)
}

/// `binom(n, k)` as an exact integer.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        acc = acc * (n as u128 - k as u128 + i) / i;
    }
    acc
}

/// The Fuss–Catalan number `binom(m(n+1), m-1) / m`.
pub fn fuss_catalan(m: u64, n: u64) -> Result<u128> {
    if m == 0 {
        return Err(argument("Fuss-Catalan numbers need m >= 1"));
    }
    Ok(binomial(m * (n + 1), m - 1) / m as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{One, Star};

    #[test]
    fn single_pair() {
        let p = enumerate_pairings(&[Star, One]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].pairs(), &[(1, 2)]);
    }

    #[test]
    fn four_vertex_patterns() {
        let p = enumerate_pairings(&[Star, Star, One, One]).unwrap();
        assert_eq!(p.len(), 2);
        let mut cr: Vec<_> = p.iter().map(crossings).collect();
        cr.sort_unstable();
        assert_eq!(cr, vec![0, 1]);
        assert_eq!(enumerate_pairings(&[Star, One, Star, One]).unwrap().len(), 2);
    }

    #[test]
    fn crossing_counts() {
        let labels = vec![Star, Star, One, One];
        let nested = PairPartition::new(vec![(1, 4), (2, 3)], labels.clone()).unwrap();
        assert_eq!(nested.crossings(), 0);
        let crossed = PairPartition::new(vec![(1, 3), (2, 4)], labels).unwrap();
        assert_eq!(crossed.crossings(), 1);
    }

    #[test]
    fn invalid_inputs() {
        assert!(enumerate_pairings(&[Star]).is_err());
        assert!(enumerate_pairings(&[Star, Star]).is_err());
        assert!(PairPartition::new(vec![(1, 2)], vec![Star, Star]).is_err());
        assert!(PairPartition::new(vec![(1, 2)], vec![Star, One, Star, One]).is_err());
    }

    #[test]
    fn incremental_crossings_agree_with_direct_count() {
        let labels = vec![Star, One, Star, Star, One, One, Star, One, One, Star];
        for_each_matching(
            labels.len(),
            |i, j| labels[i] != labels[j],
            |partner, cr| {
                let pairs = partner
                    .iter()
                    .enumerate()
                    .filter(|&(i, &j)| i < j)
                    .map(|(i, &j)| (i + 1, j + 1))
                    .collect();
                let p = PairPartition::new(pairs, labels.clone()).unwrap();
                assert_eq!(p.crossings(), cr);
            },
        );
    }

    #[test]
    fn all_pairings_count_is_double_factorial() {
        // (2m-1)!! matchings without constraints
        let mut expected = 1;
        for m in 1..=6 {
            expected *= 2 * m - 1;
            assert_eq!(for_each_matching(2 * m, |_, _| true, |_, _| {}), expected);
        }
        assert_eq!(for_each_matching(5, |_, _| true, |_, _| {}), 0);
    }

    #[test]
    fn fuss_catalan_values() {
        for n in 0..6 {
            assert_eq!(fuss_catalan(1, n).unwrap(), 1);
        }
        assert_eq!(fuss_catalan(2, 1).unwrap(), 2);
        assert_eq!(fuss_catalan(3, 1).unwrap(), 5);
        assert_eq!(fuss_catalan(2, 2).unwrap(), 3);
        // ordinary Catalan numbers at n = 1
        assert_eq!(fuss_catalan(5, 1).unwrap(), 42);
        assert!(fuss_catalan(0, 1).is_err());
    }
}
