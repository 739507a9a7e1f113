//! Error type shared by every fallible operation in the crate.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter violated its documented constraint. `name` is the
    /// parameter as the caller knows it (config key or argument name).
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The block error rate is so close to 1 that the stationary average
    /// age diverges (no update ever gets through at working precision).
    #[error(
        "average age is unbounded: block error rate {error_rate} leaves \
         a success probability below {floor}"
    )]
    UnboundedAge { error_rate: f64, floor: f64 },

    /// The age difference between the two schemes has the same sign at
    /// both ends of the searched redundancy range.
    #[error(
        "no crossover in redundancy range [{lo}, {hi}]: the same scheme \
         wins at both endpoints"
    )]
    NoCrossover { lo: u32, hi: u32 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
