use alloc::string::String;

/// Failures raised by assembly, solvers and integrators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("kernel profile has (near) zero mass: {mass:e}")]
    ZeroMass { mass: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("grid resolution {n} is below the minimum of 2 cells")]
    InvalidResolution { n: usize },

    #[error("kernel hypothesis violated: dist(A,B) = {dist}, support radius = {radius}")]
    HypothesisViolation { dist: f64, radius: f64 },

    #[error("singular system: {0}")]
    SingularSystem(&'static str),

    #[error("symmetric eigendecomposition did not converge")]
    EigFailure,

    #[error("fixed-point map is not a contraction on this window (factor {factor:.4})")]
    NoContraction { factor: f64 },

    #[error("fixed-point iteration stopped after {iterations} sweeps without meeting tolerance")]
    NotConverged { iterations: usize },

    #[error("decay fit needs at least 3 strictly positive samples")]
    DegenerateFit,

    #[error("length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = core::result::Result<T, Error>;
