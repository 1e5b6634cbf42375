use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by constructors, solvers, and diagnostics.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("profile decreases near lambda = {lambda:e}; target must be non-decreasing")]
    ProfileNotIncreasing { lambda: f64 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("cannot fit on a log scale: {0}")]
    CannotFitLog(String),

    #[error("bracket does not enclose the solution: {0}")]
    Bracket(String),

    #[error("no eigenvalue falls in the band [{lo:e}, {hi:e}] around alpha = {alpha:e}")]
    EmptyBand { alpha: f64, lo: f64, hi: f64 },

    #[error("division by a vanishing quantity: {0}")]
    Division(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("noise level too large: {0}")]
    DeltaTooLarge(String),

    #[error("curve is not monotone at alpha = {alpha:e}")]
    NonMonotone { alpha: f64 },

    #[error(
        "exact error vanishes for all alpha <= {epsilon:e}; only the trivial noise bound applies"
    )]
    TrivialCase { epsilon: f64 },
}
