use thiserror::Error;

/// Errors produced by the invariant computations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("monomial {0:?} is not in the module basis")]
    NotInModule(Vec<usize>),
    #[error("truncation degree {n} is below the maximum generator degree {need}")]
    TruncationTooSmall { n: usize, need: usize },
    #[error("evaluation point lies outside the open unit polydisc")]
    OutsideDomain,
    #[error("operation requires a monomial ideal")]
    NonMonomialIdeal,
    #[error("stacked operator is numerically zero")]
    DegenerateModule,
    #[error("kernel vector vanishes at the requested point")]
    OnVariety,
    #[error("singular values straddle the rank tolerance (gap {gap:.3e}, threshold {threshold:.3e})")]
    IllSeparatedKernel { gap: f64, threshold: f64 },
    #[error("truncation starvation: mass {mass:.3e} in the top two degrees")]
    TruncationStarvation { mass: f64 },
    #[error("claimed unit factor vanishes at the base point (|value| = {value:.3e})")]
    InvalidWitness { value: f64 },
    #[error("frame Gram matrix is singular")]
    DegenerateFrame,
    #[error("point outside the series convergence ball (|w - w0| = {dist:.3e}, radius {radius:.3e})")]
    OutOfRadius { dist: f64, radius: f64 },
    #[error("stalk combinatorics are available only at the origin")]
    UnsupportedPoint,
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
