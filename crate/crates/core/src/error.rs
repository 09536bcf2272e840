use thiserror::Error;

/// Errors raised by the numerics library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed decimal literal {0:?}")]
    MalformedLiteral(String),

    #[error("q out of range: {0} (need 0 < q < 1)")]
    QOutOfRange(String),

    #[error("mantissa precision {0} bits is below the 64-bit minimum")]
    PrecisionTooLow(u32),

    #[error("tail tolerance {0:e} must lie in (0, 2^-32)")]
    InvalidTolerance(f64),

    #[error("{0} requires a nonzero argument")]
    ZeroArgument(&'static str),

    #[error("truncation needs more than {limit} terms")]
    TruncationLimit { limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "stabilization failed after {escalations} escalations: \
         best agreement {best_digits} digits, target {target_digits}"
    )]
    StabilizationFailed {
        escalations: u32,
        best_digits: u32,
        target_digits: u32,
    },

    #[error("zero count mismatch: expected {expected}, bracketed {found}")]
    ZeroCountMismatch { expected: usize, found: usize },

    #[error("family {family} produced a non-finite coefficient at n={n}, k={k}")]
    NonFiniteCoefficient { family: String, n: usize, k: usize },
}

impl Error {
    /// True for failures of the numerical machinery itself (as opposed to
    /// rejected inputs).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StabilizationFailed { .. }
                | Error::ZeroCountMismatch { .. }
                | Error::TruncationLimit { .. }
                | Error::NonFiniteCoefficient { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
