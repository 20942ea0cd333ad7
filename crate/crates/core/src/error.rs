//! Error types shared across the crate.

use thiserror::Error;

use crate::poly::Mode;

pub type Result<T> = std::result::Result<T, WaringError>;

#[derive(Error, Debug)]
pub enum WaringError {
    #[error("mixed scalar modes: {0} vs {1}")]
    MixedModes(Mode, Mode),

    #[error("bidegree mismatch: expected ({}, {}), found ({}, {})", expected.0, expected.1, found.0, found.1)]
    BidegreeMismatch { expected: (u8, u8), found: (u8, u8) },

    #[error("polynomial is not bihomogeneous")]
    NotBihomogeneous,

    #[error("substitution requires u-degree 0, found u-degree {0}")]
    NonzeroUDegree(u8),

    #[error("{op}: exact mode cannot represent the required radical ({detail})")]
    RadicalRequired { op: &'static str, detail: &'static str },

    #[error("{op}: precondition violated: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("{op}: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    ResidualTooLarge {
        op: &'static str,
        residual: f64,
        tolerance: f64,
    },

    #[error("{op}: no admissible generic choice after {attempts} attempts (best residual {best_residual:.3e})")]
    RetriesExhausted {
        op: &'static str,
        attempts: u32,
        best_residual: f64,
    },

    #[error("{0}: linear system is singular or rank-deficient")]
    SingularSystem(&'static str),

    #[error("{0}: input is identically zero")]
    ZeroInput(&'static str),

    #[error("verification failed: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    VerificationFailed { residual: f64, tolerance: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
