use thiserror::Error;

use crate::graph::Vertex;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("unknown graph name `{0}` (known: C<n>, K3, K4, 2K4, Y3, cubic6, Q3)")]
    UnknownGraph(String),

    #[error("graph validation failed: {0}")]
    InvalidGraph(String),

    #[error("vertex {0} out of range")]
    InvalidVertex(Vertex),

    #[error("move rank {rank} out of range for degree {degree}")]
    Arity { rank: usize, degree: usize },

    #[error("players cannot start on the same vertex ({0}) when same-site starts are disallowed")]
    InvalidStart(Vertex),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("outcome table exhausted for start pair ({0}, {1})")]
    TableExhausted(Vertex, Vertex),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
