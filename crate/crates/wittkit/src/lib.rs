//! wittkit: an exact isometry toolkit for nondegenerate quadratic forms.
//!
//! The crate constructs orthogonal transformations over Q and over Z/p^N
//! realizing Witt-type extension theorems, computes spinor norms and
//! four-factor stabilizer decompositions of special-orthogonal elements,
//! and decides the local-global predicates (local isotropy, bad places,
//! strong approximation for quadrics) behind them. Every nontrivial result
//! is emitted as an independently checkable certificate.
//!
//! Layout:
//! - [`arith`]: rationals, residues mod p^N, factorization, linear algebra;
//! - [`quad`]: quadratic forms over Q, reflections, Witt extension, spinor norms;
//! - [`lattice`]: isometries of unimodular Z_p-lattices at finite precision;
//! - [`local_global`]: Hilbert symbols, local invariants, quadric points,
//!   strong approximation;
//! - [`borovoi`]: the four-factor stabilizer decomposition and its fibers;
//! - [`cert`]: certificate containers and the independent verifier;
//! - [`io`]: JSON wire formats;
//! - [`sampling`]: deterministic generators for property suites.

pub mod arith;
pub mod borovoi;
pub mod cert;
pub mod io;
pub mod lattice;
pub mod local_global;
pub mod quad;
pub mod sampling;

/// Version string embedded in every certificate.
pub const TOOLKIT_VERSION: &str = concat!("wittkit/", env!("CARGO_PKG_VERSION"));
