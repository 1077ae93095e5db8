//! Verification toolkit for period-lattice, Riemann-form and metric
//! identities over Siegel and quaternionic modular families.
//!
//! The crate splits into an exact layer (number fields, quaternion algebras,
//! integer lattices, truncated local rings) where every assertion is checked
//! in rational arithmetic, and a numeric layer (period lattices, metrics)
//! where identities are checked against stated tolerances. The `suite`
//! module orchestrates both into deterministic, reproducible reports.

pub mod fixture;
pub mod hodge;
pub mod lattice;
pub mod local;
pub mod matrix;
pub mod number_field;
pub mod quaternion;
pub mod report;
pub mod sampling;
pub mod siegel;
pub mod suite;
pub mod twisted;

pub use matrix::Rat;
