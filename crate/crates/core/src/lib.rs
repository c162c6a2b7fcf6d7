//! Quantile shares for the fair division of indivisible goods.
//!
//! An agent's q-quantile share is the q-quantile of the value she would get
//! from a uniformly random allocation. This crate computes those shares
//! exactly, searches for fair allocations, and ships the combinatorial
//! checkers (veto lists, matroid maximin shares, matching numbers, threshold
//! searches) used to study when such shares are feasible.

pub mod allocate;
pub mod bundle;
pub mod downset;
pub mod error;
pub mod extremal;
pub mod instance;
pub mod lab;
pub mod matroid;
pub mod quantile;
pub mod rational;
pub mod repro;
pub mod valuation;
pub mod veto;

pub use bundle::{Allocation, Bundle};
pub use error::{Error, Result};
pub use instance::Instance;
pub use matroid::Matroid;
pub use quantile::ValueDistribution;
pub use rational::{Rational, Q};
pub use valuation::Valuation;
