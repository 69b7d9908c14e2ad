use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported dimension: {cols} columns (column indices must stay below {max})", max = crate::SENTINEL)]
    UnsupportedDimension { cols: usize },
    #[error("invalid CSR: {0}")]
    InvalidCsr(String),
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("bad generator spec '{spec}': {msg}")]
    BadGenSpec { spec: String, msg: String },
    #[error("bad binary matrix: {0}")]
    BadBinary(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl MatrixError {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        MatrixError::Parse { line, msg: msg.into() }
    }
}
