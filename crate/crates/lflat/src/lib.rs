//! Exact computation of L-theory invariants of flat bundles with duality.
//!
//! The crate computes, entirely in arbitrary-precision rational arithmetic:
//!
//! - classes in the ε-graded groups L_ε(G) of group representations with
//!   ε-symmetric duality, their lagrangian/sublagrangian reductions and
//!   normal forms,
//! - twisted simplicial cohomology of local systems with Poincaré duality
//!   pairings on closed oriented complexes,
//! - spectral sequences of filtered complexes with dualities descending
//!   through the pages, the symmetric forms Q_r, and the signature defects
//!   τ = 2(sign(Q1) + sign(Q2)) (lagrangian case) and τ = 2·Σ_{r≥2} sign(Q_r)
//!   (fibration case),
//! - derived pushforwards R^iπ_* of flat systems along flat fiber bundles,
//!   the index map π_*^L, and the extended index map π_*^{L^ex} with its
//!   τ correction.
//!
//! The analytic counterparts of these invariants (η-invariants, differential
//! forms, K_{ℝ/ℤ} classes, characteristic classes) are out of scope; the
//! crate computes the exact combinatorial shadow.

pub mod exactla;
pub mod repcat;
pub mod sheaves;
pub mod lgroups;
pub mod specseq;
pub mod pushfwd;
pub mod json;
pub mod corpus;

pub use exactla::{Rational, RationalMatrix, Subspace};
