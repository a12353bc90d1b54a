use thiserror::Error;

/// Errors raised by constructors and evaluators in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("an instance needs at least one trial")]
    EmptyInstance,
    #[error("success probability p[{index}] = {value} is outside [0, 1]")]
    InvalidProbability { index: usize, value: f64 },
    #[error("instance declares n = {declared} but lists {actual} probabilities")]
    LengthMismatch { declared: usize, actual: usize },
    #[error("threshold index {value} is outside [1, {max}]")]
    ThresholdOutOfRange { value: usize, max: usize },
    #[error("threshold distribution has {actual} entries, expected {expected}")]
    DistributionLength { expected: usize, actual: usize },
    #[error("threshold distribution mass {total} does not sum to 1")]
    DistributionMass { total: f64 },
    #[error("threshold distribution has invalid mass {value} at index {index}")]
    DistributionEntry { index: usize, value: f64 },
    #[error("estimation parameter {name} = {value} is outside [0, 1]")]
    InvalidAlpha { name: &'static str, value: f64 },
    #[error("epsilon = {0} is outside (0, 1/2)")]
    InvalidEpsilon(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sample counts are inconsistent: {0}")]
    InvalidCounts(String),
    #[error("sample matrix is {m}x{n} but {actual} bits were given")]
    SampleShape { m: usize, n: usize, actual: usize },
    #[error("instance has n = {instance} trials but samples cover {samples}")]
    DimensionMismatch { instance: usize, samples: usize },
    #[error("enumeration over {bits} random sample bits exceeds the cap of {cap}")]
    EnumerationTooLarge { bits: usize, cap: usize },
    #[error("{0} has no closed-form threshold distribution")]
    NoExactForm(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
