use thiserror::Error;

use crate::sdp::SolveStatus;

/// Errors raised by the linear-algebra, entropy and coherence layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: |m[{row}][{col}] - conj(m[{col}][{row}])| = {deviation:e}")]
    NonHermitian {
        row: usize,
        col: usize,
        deviation: f64,
    },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at [{row}][{col}]")]
    NonFinite { row: usize, col: usize },

    #[error("support of the first state is not contained in the support of the second")]
    SupportViolation,

    #[error("invalid Rényi order {0}")]
    InvalidOrder(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "SDP solver failed for {context}: {status:?} after {iterations} iterations (gap {gap:e})"
    )]
    Solver {
        context: &'static str,
        status: SolveStatus,
        iterations: usize,
        gap: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
