//! Permutations, q-numbers, star/one pairings and the scalar constants.

mod constants;
mod pairing;
mod permutation;
mod qnumbers;

pub use constants::{constants, QConstants, DEFAULT_SERIES_TOL, SLOW_CONVERGENCE_Q};
pub use pairing::{
    binomial, crossing_sum, crossings, enumerate_pairings, for_each_matching, fuss_catalan, Label,
    PairPartition,
};
pub use permutation::{coset_representatives, factor_coset, CosetFactorization, Permutation};
pub use qnumbers::{q_binomial, q_factorial, q_integer};

/// Number of inversions of `p`.
pub fn inversions(p: &Permutation) -> usize {
    p.inversions()
}
