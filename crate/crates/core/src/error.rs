use crate::anchor::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("angle undefined: point coincides with the origin")]
    DegenerateAngle,
    #[error("invalid anchor: {}", join_violations(.0))]
    InvalidAnchor(Vec<Violation>),
    #[error("sample has no attachment anchor")]
    MissingAnchor,
    #[error("point ({x}, {y}) lies outside the {width}x{height} image")]
    OutOfBounds { x: f64, y: f64, width: u32, height: u32 },
    #[error("grasp distance {distance} exceeds the image diagonal {diagonal}")]
    BeyondDiagonal { distance: f64, diagonal: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("zero variance: {0}")]
    ZeroVariance(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("sample {index} is missing meta key {key:?}")]
    MissingMeta { index: usize, key: String },
    #[error("unfitted case {0}")]
    UnfittedCase(u8),
    #[error("degenerate circular mean (resultant length {0:e})")]
    DegenerateCircularMean(f64),
    #[error("retry budget of {0} attempts exhausted")]
    RetryExhausted(usize),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
