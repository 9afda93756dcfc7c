//! # l2disc
//!
//! Exact L2-discrepancy of finite point sets in the unit square, the Haar
//! decomposition of the discrepancy function over dyadic intervals, occupancy
//! censuses of those intervals, and an independently verified recomputation of
//! the extremal constants of the normalized-discrepancy lower bound.
//!
//! The crate is organized around five computation modules plus a CLI:
//!
//! - `pointset`: generators (Hammersley, Fibonacci lattices, seeded random)
//!   and a plain-text file format with exact-rational coordinates.
//! - `discrepancy`: the pointwise discrepancy function, the exact pair-sum
//!   formula for its squared L2 norm, and a Monte Carlo oracle.
//! - `haar`: dyadic boxes, Haar coefficients of the discrepancy function in
//!   closed form, and truncated Parseval sums.
//! - `census`: per-shape and per-level occupancy counts, one-point box
//!   types, coefficient bundles, and both sides of the master lower-bound
//!   inequality.
//! - `bounds`: the scalar optimization layer producing the bound constants,
//!   cross-checked against brute-force grids.

pub mod bounds;
pub mod census;
pub mod cli;
pub mod coord;
pub mod discrepancy;
pub mod error;
pub mod haar;
pub mod pointset;
pub mod verify;

pub use coord::Coord;
pub use error::{Error, Result};
pub use pointset::{Point2, PointSet};
