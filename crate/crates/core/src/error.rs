use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degree {degree} is outside the window [{lo}, {hi}]")]
    OutOfWindow { degree: i32, lo: i32, hi: i32 },

    /// A twisted Koszul slot needs degrees the base module was not realized on.
    #[error("window overflow: need base degrees [{need_lo}, {need_hi}], have [{lo}, {hi}]")]
    WindowOverflow {
        need_lo: i32,
        need_hi: i32,
        lo: i32,
        hi: i32,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search failed: {0}")]
    SearchFailure(String),

    /// Primary algorithm and cross-check disagree.
    #[error("cross-check mismatch: {0}")]
    Diagnostic(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
