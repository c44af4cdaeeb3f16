use thiserror::Error;

/// Errors shared by the whole workspace.
///
/// `Degenerate` is the important one: exact predicates let us detect measure
/// zero coincidences (a diagonal hitting a vertex, a tie between candidate
/// return faces) instead of silently resolving them, and every such detection
/// must surface as a structured error rather than a wrong count.
#[derive(Debug, Error)]
pub enum PexError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid exchange: {0}")]
    InvalidExchange(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PexError>;
