use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. Every variant is a domain error; usage
/// errors are handled by the CLI argument parser.
#[derive(Debug, Error)]
pub enum SvolError {
    #[error("malformed ring tag `{0}`")]
    MalformedRingTag(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid seminorm/carrier pairing: {0}")]
    InvalidPairing(String),
    #[error("malformed rational `{0}`")]
    MalformedRational(String),
    #[error("{value} is not representable in {ring}")]
    NotRepresentable { value: String, ring: String },
    #[error("unknown simplex `{0}`")]
    UnknownSimplex(String),
    #[error("chain simplex `{id}` has dimension {actual}, expected {expected}")]
    DimensionMismatch { id: String, expected: usize, actual: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid covering: {0}")]
    InvalidCovering(String),
    #[error("chain is not a relative cycle over {0}")]
    NotACycle(String),
    #[error("chain is not a relative fundamental cycle over {0}")]
    NotFundamental(String),
    #[error("cochain is nonzero on boundary simplex `{0}`")]
    CochainOnBoundary(String),
    #[error("class representative is infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("contradiction for {space} over {ring}: lower bound {lo} exceeds upper bound {hi} ({trace})")]
    Contradiction { space: String, ring: String, lo: String, hi: String, trace: String },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
}

pub type Result<T, E = SvolError> = std::result::Result<T, E>;
