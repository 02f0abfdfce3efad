//! Finite Reedy categories, Reedy functors between them, and decision
//! procedures for when such a functor interacts well with matching and
//! latching constructions on diagram categories.
//!
//! Everything here is exact and finite: categories come with explicit
//! composition tables, diagrams take values in finite sets, and every
//! verdict (fibering, cofibering, cofinality, bijectivity of comparison
//! maps) is decided by enumeration rather than by numerical approximation.
//! All enumeration orders are deterministic, so serialized reports are
//! byte-stable across runs.

pub mod catalog;
pub mod counterexample;
pub mod error;
pub mod files;
pub mod fincat;
pub mod quillen;
pub mod reedy;
pub mod setdiag;
pub mod size;
pub mod union_find;

pub use error::{Error, Result};
