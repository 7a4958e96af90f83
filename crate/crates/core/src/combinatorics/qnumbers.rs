use crate::error::{argument, check_q, Result};

/// The q-integer `[n]_q = 1 + q + … + q^{n-1}`.
pub fn q_integer(n: usize, q: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += term;
        term *= q;
    }
    sum
}

/// `[n]_q! = [1]_q [2]_q ⋯ [n]_q`, with `[0]_q! = 1`.
pub fn q_factorial(n: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok((1..=n).map(|j| q_integer(j, q)).product())
}

/// The Gaussian binomial `[n]_q! / ([k]_q! [n-k]_q!)`.
///
/// Evaluated as a product of ratios of q-integers so it stays accurate for large `n`.
pub fn q_binomial(n: usize, k: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    if k > n {
        return Err(argument(format!("q-binomial needs k <= n, got n = {n}, k = {k}")));
    }
    let k = k.min(n - k);
    Ok((1..=k)
        .map(|i| q_integer(n - k + i, q) / q_integer(i, q))
        .product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn free_case_is_trivial() {
        for n in 0..12 {
            assert_eq!(q_factorial(n, 0.0).unwrap(), 1.0);
            for k in 0..=n {
                assert_eq!(q_binomial(n, k, 0.0).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn small_values() {
        assert_relative_eq!(q_factorial(3, 0.5).unwrap(), 2.625, epsilon = 1e-15);
        assert_eq!(q_factorial(0, 0.7).unwrap(), 1.0);
        // [4 choose 2]_q = 1 + q + 2q^2 + q^3 + q^4
        let q: f64 = 0.3;
        let expected = 1.0 + q + 2.0 * q * q + q.powi(3) + q.powi(4);
        assert_relative_eq!(q_binomial(4, 2, q).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(q_binomial(2, 3, 0.1).is_err());
        assert!(q_factorial(2, 1.0).is_err());
        assert!(q_binomial(2, 1, -1.0).is_err());
    }

    #[test]
    fn factorial_identity() {
        for &q in &[-0.9, -0.5, 0.0, 0.4, 0.8] {
            for n in 0..15 {
                for k in 0..=n {
                    let lhs = q_binomial(n, k, q).unwrap()
                        * q_factorial(k, q).unwrap()
                        * q_factorial(n - k, q).unwrap();
                    assert_relative_eq!(lhs, q_factorial(n, q).unwrap(), max_relative = 1e-12);
                }
            }
        }
    }
}
