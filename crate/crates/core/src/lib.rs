//! Numerics and combinatorics for q-deformed Fock spaces and q-circular systems.
//!
//! Everything lives on a truncated Fock space described by a [`QContext`]; operators are
//! compressions to that truncation, so computed norms are lower bounds that grow with it.

pub mod combinatorics;
pub mod error;
pub mod fockspace;
pub mod inequalities;
pub mod moments;
pub mod qcircular;

pub use num_complex::Complex64 as C64;

pub use combinatorics::{constants, QConstants};
pub use error::{Error, Result};
pub use fockspace::{FockOperator, FockVector, Letter, OpExpr, QContext, Word};
