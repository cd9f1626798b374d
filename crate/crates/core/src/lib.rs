//! Exact signed, deficient and ordinary topological measures on a dyadic grid model of
//! the plane, with executable checks of their axioms and decomposition theorems.
//!
//! Regions ([`grid::GridRegion`]) are open or closed subsets of ℝ² described by finite or
//! cofinite sets of dyadic cells. Set functions ([`measures::SetFunction`]) evaluate them to
//! exact [`value::ExtendedValue`]s. The [`variations`] module computes positive, negative and
//! total variations by exact search over grid compacts, [`solid_extension`] extends
//! solid-set functions to whole set functions, and [`checkers`] runs the axiom suites.

pub mod checkers;
pub mod error;
pub mod grid;
pub mod measures;
pub mod par;
pub mod scenario;
pub mod solid_extension;
pub mod value;
pub mod variations;

pub use error::{Error, Result};
pub use value::{ExtendedValue, Rational};
