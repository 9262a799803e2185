use thiserror::Error;

/// Errors raised by the detection toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid parameters or an unsupported combination of options.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The amplitude prior collapses to a point (L = 1), so the density is undefined.
    #[error("degenerate amplitude prior: ratio L = 1 has no density")]
    DegeneratePrior,

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("integration did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    Integration { estimate: f64, tolerance: f64 },

    /// A ratio of the form x / entropy was requested with zero entropy.
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// A threshold cache lookup missed.
    #[error("missing threshold cache entry for {0}")]
    MissingCacheEntry(String),

    #[error("malformed cache record at line {line}: {reason}")]
    CacheFormat { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Integration { .. } | Error::UndefinedRatio(_) => 3,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
