use thiserror::Error;

/// Errors raised by the transform engine. Every variant is an invalid-argument
/// condition; the engine has no I/O of its own.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: u32, height: u32 },

    #[error("unsupported channel count {0} (expected 1 or 3)")]
    UnsupportedChannels(u8),

    #[error("pixel data has length {actual}, expected {expected}")]
    DataLength { expected: usize, actual: usize },

    #[error("image key must not be empty")]
    EmptyImageKey,

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("severity {0} is outside 1..=5")]
    SeverityOutOfRange(i64),

    #[error("{name} must be at least 1")]
    ZeroParameter { name: &'static str },

    #[error("requested {requested} segments but the image only has {pixels} pixels")]
    TooManySegments { requested: u32, pixels: usize },

    #[error("segment map is {map_width}x{map_height} but the image is {width}x{height}")]
    DimensionMismatch {
        width: u32,
        height: u32,
        map_width: u32,
        map_height: u32,
    },

    #[error("color flatten needs a 3-channel image, got {0} channel(s)")]
    NotRgb(u8),

    #[error("invalid transform spec: {field}: {reason}")]
    InvalidSpec { field: String, reason: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
