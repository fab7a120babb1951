use thiserror::Error;

/// Errors raised by the linear algebra, testers, oracles and generators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{which} is not unitary: ||a^dag a - I||_F = {residual:.3e} exceeds {tol:.1e}")]
    NotUnitary {
        which: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("qubit index {index} is out of range 1..={n_qubits}")]
    InvalidQubit { index: usize, n_qubits: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size guard violated: {0}")]
    Guard(String),

    #[error("probability mass {0} deviates from 1 (non-unitary input upstream?)")]
    ProbabilityMass(f64),

    #[error(
        "members {first} and {second} coincide up to a global phase (delta = {delta:.3e}); \
         deduplicate the subset"
    )]
    DegenerateSubset {
        first: usize,
        second: usize,
        delta: f64,
    },

    #[error("perturbation search failed: {0}")]
    Bisection(String),

    #[error("malformed matrix data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
