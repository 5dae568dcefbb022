use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown precision `{0}` (expected binary32 or binary64)")]
    UnknownPrecision(String),

    #[error("unknown profile `{0}`")]
    UnknownProfile(String),

    #[error("unknown engine `{0}` (expected crscl, naive_smith or naive_textbook)")]
    UnknownEngine(String),

    #[error("gamma_{k} is undefined: k*u = {ku} >= 1")]
    GammaUndefined { k: u32, ku: f64 },

    #[error("stride must be positive")]
    ZeroStride,

    #[error("strided access out of bounds: offset {offset} + ({len} - 1) * {stride} >= buffer length {buffer}")]
    StrideOutOfBounds {
        offset: usize,
        stride: usize,
        len: usize,
        buffer: usize,
    },

    #[error("matrix dimensions {rows}x{cols} do not match buffer length {len}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid number `{0}`")]
    InvalidNumber(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
