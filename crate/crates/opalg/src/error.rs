//! Error types shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    /// Block counts, block shapes, or ambient algebras do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A matrix or map that must be inverted is numerically singular.
    #[error("not invertible: {0}")]
    NotInvertible(String),

    /// A quantitative hypothesis of the underlying estimate is violated,
    /// e.g. the cb-norm product reached `product` where `limit` is required.
    #[error("hypothesis not met: {what} (got {product}, limit {limit})")]
    HypothesisNotMet {
        what: String,
        product: f64,
        limit: f64,
    },

    /// An iterative scheme ran out of its iteration budget.
    #[error("no convergence after {iterations} iterations (best residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A correction step produced a numerically singular transport map.
    #[error("singular correction step at iteration {iteration} (condition {condition:.3e})")]
    SingularStep { iteration: usize, condition: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An input matrix violates a structural precondition (e.g. not Hermitian).
    #[error("structural error: {0}")]
    Structural(String),

    /// An error raised by a named stage of a multi-stage pipeline.
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
