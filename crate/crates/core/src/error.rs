use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("invalid mask dimensions {width}x{height} for {len} pixels")]
    BadDimensions { width: usize, height: usize, len: usize },
    #[error("shape degenerates to {pixels} pixels (minimum 16)")]
    Degenerate { pixels: usize },
    #[error("invalid transform parameters: {0}")]
    InvalidTransform(String),
    #[error("map is not invertible (det = {0})")]
    Singular(f64),
    #[error("warped canvas {width}x{height} exceeds the {max}x{max} limit")]
    CanvasTooLarge { width: usize, height: usize, max: usize },
    #[error("mask needs {needed} pixels of background margin, has {available}")]
    InsufficientMargin { needed: usize, available: usize },
    #[error("invalid metric configuration: {0}")]
    InvalidConfig(String),
    #[error("descriptor grids do not match: {0}")]
    GridMismatch(String),
    #[error("invalid retrieval input: {0}")]
    InvalidRetrieval(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
