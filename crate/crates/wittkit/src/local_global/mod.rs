//! Local invariants over Q_p and R and the decisions built on them:
//! Hilbert symbols, Hasse invariants, local and global isotropy, Witt
//! indices, bad places of a standard-shape form, integral points on the
//! complement quadrics, and the strong-approximation criterion for
//! quadrics q = a in at least three variables.
//!
//! p = 2 is admitted here (symbols at 2 are needed for the product formula
//! and every global decision); the lattice-lifting machinery elsewhere
//! excludes it.

mod hilbert;
mod isotropy;
mod quadric;

pub use hilbert::{hasse_invariant, hilbert_symbol, is_local_square, relevant_symbol_places, PlaceQ};
pub use isotropy::{
    is_isotropic_global, is_isotropic_local, local_invariants, relevant_places,
    represents_local, witt_index_local, LocalInvariants,
};
pub use quadric::{
    bad_places, quadric_noncompact_places, quadric_zp_point, strong_approx_quadric, SapReason,
    SapVerdict,
};

use crate::arith::ArithError;
use crate::quad::QuadError;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LocalError {
    #[error("zero input where a nonzero value is required")]
    ZeroInput,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("place p={0} is a bad place for this form")]
    BadPlace(u64),
    #[error("form is not in standard shape")]
    NotStandardShape,
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("dimension must be at least {0}")]
    DimensionTooSmall(usize),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("quadratic-form error: {0}")]
    Quad(String),
}

impl From<QuadError> for LocalError {
    fn from(e: QuadError) -> Self {
        LocalError::Quad(e.to_string())
    }
}
