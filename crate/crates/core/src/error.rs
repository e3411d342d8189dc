use crate::model::DiscId;

/// Errors produced by the solvers and the file readers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("unknown disc id {0}")]
    UnknownDisc(DiscId),

    #[error("disc id {0} listed more than once")]
    DuplicateDisc(DiscId),

    #[error("coverage infeasible: diameters sum to {sum}, segment length is {length}")]
    CoverageInfeasible { sum: f64, length: f64 },

    #[error("instance must have unit length (got {0})")]
    NotUnitLength(f64),

    #[error("selected set is empty")]
    EmptySelection,

    #[error("multiplier for disc {id} is {value}; multipliers must be finite and nonnegative")]
    InvalidMultiplier { id: DiscId, value: f64 },

    #[error("disc {0} is both forced on and excluded")]
    ConflictingFix(DiscId),

    #[error("no disc is available to cover the segment")]
    NoAvailableDisc,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("upper bound {ub} is below the computed lower bound {lb}")]
    InvalidUpperBound { ub: f64, lb: f64 },

    #[error("brute force limited to {max_q} discs, instance has {q}")]
    TooLarge { q: usize, max_q: usize },

    #[error("configuration u={0} is not supported (supported: 0, 1, 2, 3, 5)")]
    UnsupportedConfig(u8),

    #[error("uniform solver needs identical discs; disc {0} differs from the first")]
    NonUniform(DiscId),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
