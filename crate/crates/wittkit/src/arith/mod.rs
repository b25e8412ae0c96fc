//! Exact arithmetic substrate: arbitrary-precision rationals, truncated
//! p-adic residues, square classes, integer factorization, and exact
//! linear algebra over Q, F_p and Z/p^N.
//!
//! Everything here is pure and immutable; no floating point anywhere.

mod factor;
mod matrix;
mod padic;
mod rational;
mod ring;
mod square_class;

pub use factor::{factorize, is_prime_u64, Factorization, DEFAULT_FACTOR_BOUND};
pub use matrix::{
    kernel_basis, mat_add, mat_determinant, mat_identity, mat_inverse, mat_mul, mat_scale,
    mat_sub, mat_vec, solve_linear, LinearSolution, Matrix, MatrixFp, MatrixPN, MatrixQ,
};
pub use padic::{
    residue_valuation, sqrt_mod_p, PAdicApprox, ResidueRing, VectorPN,
};
pub use rational::{
    is_square_rat, padic_valuation, rat_from_str, rat_i64, rat_to_string, Rat,
};
pub use ring::{Field, PrimeField, RatField, Ring};
pub use square_class::{square_class, square_class_int, SquareClass};

use thiserror::Error;

/// Errors raised by the exact-arithmetic layer.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ArithError {
    #[error("valuation of zero undefined")]
    ZeroInput,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("non-unit pivot obstruction over Z/p^N")]
    NonUnitPivot,
    #[error("factorization incomplete: unfactored cofactor {cofactor}")]
    IncompleteFactorization { cofactor: String },
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("invalid rational literal: {0}")]
    BadRational(String),
    #[error("residue {0} out of range for the stated precision")]
    ResidueRange(String),
}
