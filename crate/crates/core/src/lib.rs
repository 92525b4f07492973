//! Bounds on the θ-intermediate dimensions of Bedford–McMullen carpets.
//!
//! The crate computes the Hausdorff and box dimensions of a carpet, the
//! Cramér rate function of its column counts, two- and three-scale upper
//! bounds, measure-based lower bounds, and exact finite-depth counts over
//! the symbolic space that cross-check the asymptotic formulas.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carpet;
pub mod curve;
pub mod dimension;
pub mod error;
pub mod lower;
pub mod oracle;
pub mod rate;
pub mod upper;

pub use carpet::{Carpet, CarpetSpec, ProbVector};
pub use dimension::{box_dim, hausdorff_dim, DimPair};
pub use error::{Error, Result};
pub use rate::RateFunction;
