use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input is outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method failed to converge.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The power series did not settle below the truncation tolerance.
    #[error("series truncation did not converge within {cap} terms on [0, {xmax}] (last term ratio {last_ratio:.3e})")]
    Truncation { cap: usize, xmax: f64, last_ratio: f64 },

    /// The integrand beyond the evaluation window is not demonstrably negligible.
    #[error("integrability inconclusive: tail estimate {tail:.3e} vs partial integral {partial:.3e} ({reason})")]
    Integrability { tail: f64, partial: f64, reason: String },

    /// Malformed configuration text.
    #[error("config error on line {line}: {msg}")]
    Config { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
