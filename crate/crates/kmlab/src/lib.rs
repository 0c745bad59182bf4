//! A desk-scale laboratory for description-length sequence prediction.
//!
//! The crate enumerates every program up to a length budget on a small
//! monotone machine, tabulates which binary strings those programs reach,
//! and turns the resulting description lengths into predictive functions
//! that can be compared against true environment measures, loss matrix in
//! hand. All probability mass is exact rational arithmetic; no floating
//! point enters any result.
//!
//! Module map:
//!
//! * [`bits`]: binary strings, prefix sets, Kraft sums.
//! * [`rational`]: the exact rational scalar used everywhere.
//! * [`machines`]: the reference machine and the block machine.
//! * [`complexity`]: enumeration, complexity tables, caching.
//! * [`loss`]: bounded loss matrices.
//! * [`predict`]: predictive functions, posteriors, loss-minimizing actions.
//! * [`environments`]: computable measures and sampling.
//! * [`experiments`]: the reproducible experiment suite behind the CLI.

#![forbid(unsafe_code)]

pub mod bits;
pub mod complexity;
pub mod environments;
pub mod experiments;
pub mod guide;
pub mod loss;
pub mod machines;
pub mod predict;
pub mod rational;

pub use bits::{off_sequence_set, BinString, PrefixSet};
pub use loss::LossMatrix;
pub use rational::Rat;
