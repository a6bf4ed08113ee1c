use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {x} is outside the domain of the weight (limit {limit})")]
    IndexOutOfDomain { x: usize, limit: usize },

    #[error("interval [{y},{x}] is empty")]
    EmptyInterval { y: usize, x: usize },

    #[error("norm N_{x} is zero")]
    ZeroNorm { x: usize },

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("operation not supported for this weight family: {0}")]
    UnsupportedFamily(String),

    #[error("stationary distribution is not unique (kernel dimension {dim})")]
    NotIrreducible { dim: usize },

    #[error("walk has no strictly positive stationary distribution")]
    NoPositiveStationary,

    #[error("lambda sequence is not stochastic{}", witness.map(|z| format!(" (witness z={z})")).unwrap_or_default())]
    NotStochastic { witness: Option<usize> },

    #[error("state 0 is not accessible from every state")]
    ZeroNotAccessible,

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("matrix is singular")]
    Singular,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid transition matrix: {0}")]
    InvalidMatrix(String),

    #[error("cycle enumeration is capped at n = {cap} (got n = {n}); use the sampled check")]
    CycleEnumerationCap { n: usize, cap: usize },

    #[error("adaptive quadrature exceeded its budget of {budget} nodes")]
    QuadratureNonConvergence { budget: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
