use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("invalid length {len}: {reason}")]
    InvalidLength { len: usize, reason: &'static str },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Raised when an operation needs orthogonal translates and the
    /// filter fails `sum c_k c_{k-2m} = 2 delta_{0m}`.
    #[error("filter fails condition O (residual {residual:e})")]
    ConditionOFailed { residual: f64 },

    #[error("eigenvalue 1 is not in the spectrum of the integer-value system")]
    NoSolution,

    #[error("degenerate filter: {0}")]
    DegenerateFilter(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("insufficient data for a fit: {points} points, need at least {required}")]
    InsufficientData { points: usize, required: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

pub(crate) fn log2_exact(n: usize) -> Option<usize> {
    is_power_of_two(n).then(|| n.trailing_zeros() as usize)
}
