use thiserror::Error;

use crate::splitting::Rejection;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(Rejection),

    #[error("solution certificate rejected: residual {residual:e} exceeds {tolerance:e}")]
    Certificate { residual: f64, tolerance: f64 },

    #[error("trace was recorded without dual values")]
    DualValuesAbsent,

    #[error("protocol violation on edge {from}->{to} in round {round}: {detail}")]
    Protocol {
        from: usize,
        to: usize,
        round: u64,
        detail: String,
    },

    #[error("oracle unavailable: {0}")]
    Oracle(String),
}
