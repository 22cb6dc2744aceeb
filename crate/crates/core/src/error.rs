use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid degree/order: {0}")]
    InvalidIndex(String),

    #[error("grid too coarse: degree {requested} needs quadrature exactness {required}, grid provides {available}")]
    GridTooCoarse {
        requested: usize,
        required: usize,
        available: usize,
    },

    #[error("grid mismatch: expected {expected} samples, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("no grid nodes fall inside the region; use a finer grid (current degree {grid_degree})")]
    EmptyPatch { grid_degree: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("h1 is not constant on the patch: relative deviation {deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotConstantOnPatch { deviation: f64, tolerance: f64 },

    #[error("kernel pair is trivial (both fields vanish identically)")]
    TrivialKernelPair,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("numerical contract violated: {0}")]
    NumericalContract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
