//! Certified inner approximation of the range of `f: R^m -> R^n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`interval`]: outward-rounded intervals, boxes and interval matrices.
//! * [`expr`]: function descriptions, their natural interval extension and
//!   interval Jacobians by forward-mode differentiation.
//! * [`inclusion`]: the preconditioned H-operator tests that certify
//!   `Y ⊆ f(X)` for square and rectangular Jacobians.
//! * [`binlp`]: an exact 0-1 linear programming solver.
//! * [`rank`]: regularity tests and rank-profile extraction for interval
//!   matrices.
//! * [`paver`]: the bisection driver producing inner and boundary boxes.
//! * [`generators`] and [`experiment`]: random matrix families, presets and
//!   the benchmark harness used by the CLI.

// Negated comparisons send NaN to the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binlp;
pub mod error;
pub mod experiment;
pub mod expr;
pub mod generators;
pub mod inclusion;
pub mod interval;
pub mod par;
pub mod paver;
pub mod rank;

pub use error::{Error, Result};
pub use expr::FunctionModel;
pub use interval::{Interval, IntervalBox, IntervalMatrix, RealMatrix};
pub use par::Execution;
