use thiserror::Error;

/// Errors raised by the precoder pipeline and the simulator around it.
#[derive(Debug, Error)]
pub enum Error {
    /// A dimension inequality of the system model was violated.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A scalar parameter is outside its admissible range.
    #[error("range error: {0}")]
    Range(String),

    #[error("length error: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("index error: {0}")]
    Index(String),

    #[error("unsupported constellation `{0}`")]
    UnsupportedConstellation(String),

    /// A matrix that must have a given rank did not, under the rank tolerance.
    #[error("rank deficiency: {0}")]
    RankDeficiency(String),

    #[error("infeasible cost allocation: {0}")]
    InfeasibleAllocation(String),

    /// An operation was called on a value in the wrong state, e.g. assembling
    /// a precoder from an infeasible solve.
    #[error("state error: {0}")]
    State(String),

    #[error("signal block {0} has zero energy")]
    ZeroSignal(usize),

    #[error("empty sample")]
    EmptySample,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
