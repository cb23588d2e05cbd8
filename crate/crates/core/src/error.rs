use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is singular to working precision (pivot {pivot:.3e} at elimination step {step})")]
    SingularMatrix { step: usize, pivot: f64 },

    #[error("matrix is not symmetric: max asymmetry {asymmetry:.3e} exceeds {tolerance:.3e}")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("eigensolver did not converge within {0} sweeps")]
    EigenNoConvergence(usize),

    #[error("interface time {alpha} is not a node of the time grid (nearest node {nearest})")]
    AlphaOffGrid { alpha: f64, nearest: f64 },

    #[error("solve residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    SolveFailed { residual: f64, tolerance: f64 },

    #[error("boundary condition mismatch: {0}")]
    BadBoundary(String),

    #[error("variant {0} is not supported by this operation")]
    UnsupportedVariant(&'static str),

    #[error("spectrum is empty")]
    EmptySpectrum,

    #[error("grid is not sorted ascending at index {0}")]
    UnsortedGrid(usize),

    #[error("too few iterations recorded: got {got}, need at least {need}")]
    TooFewIterations { got: usize, need: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
