use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed element: expected square matrix, got {rows}x{cols}")]
    Malformed { rows: usize, cols: usize },
    #[error("incompatible shapes: {0}")]
    ShapeMismatch(String),
    #[error("element is not positive: minimum eigenvalue {0:.6e}")]
    NotPositive(f64),
    #[error("empty family")]
    EmptyFamily,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no intertwining operator exists: range violation, residual {0:.3e}")]
    RangeViolation(f64),
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
