//! Concomitants, Waring rank, and verified cube decompositions of ternary
//! cubic forms over the complex numbers.
//!
//! Given the 10 coefficients of a cubic in x1, x2, x3 the crate computes its
//! classical concomitants (the Hessian, the Aronhold invariants S and T, and
//! their relatives), reads the Waring rank off a decision table, and emits an
//! explicit decomposition of the form as a sum of rank-many cubes of linear
//! forms, together with a re-expansion residual that certifies it.

pub mod battery;
pub mod classify;
pub mod cli;
pub mod concom;
pub mod decompose;
pub mod error;
pub mod factor;
pub mod poly;
pub mod transvect;

pub use error::{Result, WaringError};
