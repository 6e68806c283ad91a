use thiserror::Error;

/// Location-aware parse failure for the text formats in [`crate::io`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based column number.
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionError { expected: usize, got: usize },
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("canvas too dense: {vertices} vertices exceeds cap {cap}")]
    CanvasTooDense { vertices: u64, cap: u64 },
    #[error("invalid canvas request: {0}")]
    InvalidCanvas(String),
    #[error("sites {first} and {second} snap to the same canvas vertex {vertex}")]
    SiteCollision {
        first: usize,
        second: usize,
        vertex: usize,
    },
    #[error("site {0} lies outside the canvas domain")]
    OutOfDomain(usize),
    #[error("site index {index} out of range for {count} sites")]
    InvalidSite { index: usize, count: usize },
    #[error("need at least {need} sites, got {got}")]
    TooFewSites { need: usize, got: usize },
    #[error("net generation exceeded {0} sites")]
    NetOverflow(usize),
    #[error("invalid barycentric coordinates: {0}")]
    InvalidBarycentric(String),
    #[error("invalid theory parameters: {0}")]
    InvalidParams(String),
    #[error("site set is degenerate (co-spherical beyond tolerance)")]
    DegenerateSites,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
