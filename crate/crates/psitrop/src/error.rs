//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data: dangling references, wrong flag counts, broken
    /// bijections. Distinct from stability failures, which are reported.
    #[error("structural error: {0}")]
    Structural(String),

    /// An operation was applied outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A function or map is not piecewise linear on the given fan
    /// structure; the caller must refine first.
    #[error("refinement required: {0}")]
    RefinementRequired(String),

    /// Matrix or fixture shape does not match the operation contract.
    #[error("shape error: {0}")]
    Shape(String),

    /// Internal consistency violated (e.g. push-forward ray totals differ).
    #[error("inconsistency: {0}")]
    Inconsistent(String),

    /// Missing or unreadable fixtures/configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Requested functionality is outside the supported scope.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
