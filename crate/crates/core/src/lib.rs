//! Exact arithmetic for Brauer groups of small fields, quadratic-form and
//! Clifford invariants, twisted Brauer sets, and quiver/species invariants.
//!
//! Everything here is computed at the level of complete discrete invariants:
//! Brauer classes are finite-support vectors of local invariants in ℚ/ℤ,
//! quadratic forms are compared through rank, discriminant, signature and
//! Hasse invariants, and twist points are coset data for the Br(k)-action.
//! All arithmetic is exact; no floating point anywhere.

pub mod brauer;
pub mod error;
pub mod numfield;
pub mod quadform;
pub mod quiver;
pub mod twistclass;

pub use error::{Error, Result};
