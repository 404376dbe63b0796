use thiserror::Error;

/// Errors raised by the decoherence pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter combination that the requested operation does not support.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical routine failed to reach its target accuracy.
    #[error("numerical error: {message} (achieved error estimate {achieved:e})")]
    Numerical { message: String, achieved: f64 },

    /// Root finding was started on an interval without a sign change.
    #[error("bracket error: g({lo:e}) = {g_lo:e} and g({hi:e}) = {g_hi:e} have the same sign")]
    Bracket {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    /// The decoherence exponent stays below one over the whole search interval.
    #[error("no decoherence in range: Gamma({t_max:e}) = {gamma_max:e} < 1")]
    NoDecoherenceInRange { t_max: f64, gamma_max: f64 },

    /// A configuration document could not be parsed.
    #[error("parse error at line {line}, key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        domain(format!("{name} must be finite, got {value}"))
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        domain(format!("{name} must be positive and finite, got {value}"))
    }
}
