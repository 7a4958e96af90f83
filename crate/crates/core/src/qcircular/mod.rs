//! q-circular and q-Gaussian operators, holomorphic polynomials and the operator identities.

mod identities;
mod operators;
mod polynomial;

pub use identities::{
    annihilation_creation_residual, circular_expansion_residual, identity_suite, one_variable_residual,
    q_commutation_residual, r_factorization_residual, r_star, r_star_residual, split_norm, star_residual,
    tensor_contraction_residual, wick_residual, IdentityCheck,
};
pub use operators::{
    adjoint_product_expr, c_expr, c_op, c_star_expr, evaluate, evaluate_expr, expand_word, expand_word_terms,
    l2_norm, monomial, monomial_expr, normal_order, normal_order_terms, one_variable_normal_order, trace,
    wick_polynomial, wick_terms, x_expr, x_op,
};
pub use polynomial::HoloPolynomial;
