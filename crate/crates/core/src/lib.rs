//! Sumset structure theory on finite abelian groups, computationally.
//!
//! The crate computes the isoperimetric objects of additive combinatorics —
//! sumsets, boundaries, exteriors, periods, k-th connectivity, fragments,
//! atoms, hyper-atoms — on finite abelian groups, recognizes the structured
//! configurations that small-sumset theorems produce (progressions, punctured
//! progressions, H-progressions, essential pairs, quasi-periodic partitions),
//! classifies pairs with small sumset into the cases of those theorems with
//! re-verifiable witnesses, and exhaustively verifies the theorems at desk
//! scale with counterexample minimization.
//!
//! Module map:
//! - [`group`]: finite abelian groups, subgroups, quotient morphisms
//! - [`setops`]: subset bitmask algebra (sumset, boundary, exterior, period)
//! - [`iso`]: kappa_k connectivity, fragments, atoms, hyper/super-atoms,
//!   matchings
//! - [`structure`]: progressions, H-decompositions, essential pairs, Vosper
//!   sets, quasi-periodic partitions
//! - [`classifier`]: the theorems as total classification procedures
//! - [`verify`]: instance enumeration, verification sweeps, counterexample
//!   minimization

pub mod classifier;
pub mod error;
pub mod group;
pub mod iso;
pub mod mutation;
pub mod setops;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
