//! Truncated q-Fock space over `C^d ⊕ C^d`: words, vectors, Gram structure and operators.

mod basis;
mod context;
mod expr;
mod gram;
mod norm;
mod operator;
mod vector;
mod word;

pub use basis::{Basis, MAX_DENSE_DIM};
pub use context::{QContext, DEFAULT_HEADROOM};
pub use expr::{NormalOrdered, OpExpr};
pub use gram::{
    conjugate_gradient, dot, gram_apply, gram_entry, gram_solve, p_apply_level, p_apply_split, p_column,
    q_inner, q_inner_dense, q_norm, ORBIT_DENSE_LIMIT,
};
pub use norm::{op_norm, op_norm_matrix, NormEstimate, NormMethod, NormOptions};
pub use operator::{
    annihilate, create, number_semigroup, p_matrix, r_matrix, Csr, FockOperator, OperatorKind,
};
pub use vector::{star_vector, FockVector};
pub use word::{Letter, Word};
