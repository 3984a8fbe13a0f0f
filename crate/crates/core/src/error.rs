use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested configuration cannot be realized.
    #[error("configuration error: {0}")]
    Config(String),

    /// An iterative procedure failed to reach its tolerance.
    #[error("{what} did not converge (achieved residual {residual:.3e})")]
    NonConvergence { what: String, residual: f64 },

    /// A denominator or pivot collapsed to (numerical) zero.
    #[error("singularity: {0}")]
    Singular(String),

    /// The dense system is too ill-conditioned to trust the solution.
    #[error("ill-conditioned system (condition estimate {condition:.3e}): {advice}")]
    IllConditioned { condition: f64, advice: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
