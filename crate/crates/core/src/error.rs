use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty family: {0}")]
    EmptyFamily(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("SVD did not converge on a {rows}x{cols} matrix")]
    SvdFailed { rows: usize, cols: usize },

    #[error("numerical rank {numerical} disagrees with exact rank {exact} on a {rows}x{cols} matrix")]
    RankMismatch {
        numerical: usize,
        exact: usize,
        rows: usize,
        cols: usize,
    },

    #[error("dense oracle refused a 2^{left} x 2^{right} matrix (limit 2^{limit} per side)")]
    OracleTooLarge {
        left: usize,
        right: usize,
        limit: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
