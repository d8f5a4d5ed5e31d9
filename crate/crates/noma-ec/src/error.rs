//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the numerics, channel and effective-capacity layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Input outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical routine could not reach its accuracy target. Carries the
    /// best available estimate together with a bound on its error.
    #[error("accuracy failure in {context}: best estimate {estimate:e} with error bound {error_bound:e}")]
    Accuracy {
        context: String,
        estimate: f64,
        error_bound: f64,
    },

    /// The strong-user closed form is only defined for negative integer
    /// delay exponents; other values are served by the quadrature path.
    #[error(
        "closed form for the strong user needs a negative integer delay exponent \
         (got beta2 = {beta2}); use the quadrature path instead"
    )]
    NonIntegerBeta2 { beta2: f64 },

    /// Monte Carlo estimation over an empty sample set.
    #[error("empty sample set")]
    EmptySamples,
}

impl Error {
    /// Best estimate carried by an accuracy failure, if any.
    pub fn estimate(&self) -> Option<f64> {
        match self {
            Error::Accuracy { estimate, .. } => Some(*estimate),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
