use thiserror::Error;

/// Errors raised by grid construction, Littlewood-Paley operators, norms and witnesses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("level {level} out of band [{j_min}, {j_max}]")]
    LevelOutOfBand { level: i32, j_min: i32, j_max: i32 },

    #[error("dilation escapes grid: {0}")]
    DilationEscapesGrid(String),

    #[error("non-grid shift: offset {0} is not an integer multiple of the grid spacing")]
    NonGridShift(f64),

    #[error("invalid exponent {0}: must be positive")]
    InvalidExponent(f64),

    #[error("invalid params: {0}")]
    InvalidParams(String),

    #[error("r=inf unsupported in F-case")]
    InfiniteRInTriebel,

    #[error("zero denominator: space norm underflows")]
    ZeroDenominator,

    #[error("size {size} exceeds band: {reason}")]
    SizeExceedsBand { size: usize, reason: String },

    #[error("radius {radius} below resolution {resolution}")]
    RadiusBelowResolution { radius: f64, resolution: f64 },

    #[error("grid mismatch between operands")]
    GridMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
