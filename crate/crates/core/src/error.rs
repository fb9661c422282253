use thiserror::Error;

use crate::netspec::Diagnostic;

/// Errors raised by the numerical and construction routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not unitary: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotUnitary { residual: f64, tolerance: f64 },

    #[error("matrix is not Hermitian: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("eigenphase {phase} lies on the branch cut of the principal logarithm")]
    BranchCut { phase: f64 },

    #[error("eigen-decomposition failed to converge (residual {residual:e})")]
    EigenFailure { residual: f64 },

    #[error("invalid port {port} for a {dim}-port device")]
    InvalidPort { port: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quasi-momentum {k} is not on the {sites}-site grid 2*pi*n/{sites}")]
    OffGrid { k: f64, sites: usize },

    #[error("scattering network is at resonance: I - S_II is singular")]
    Resonance,

    #[error("network validation failed: {0}")]
    Validation(String),

    #[error("invalid network description: {}", join_diagnostics(.0))]
    Network(Vec<Diagnostic>),
}

fn join_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
