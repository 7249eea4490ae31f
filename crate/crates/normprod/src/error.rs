use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameter combination for which the formula is not defined.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Asymptotic formula evaluated outside its validity regime.
    #[error("regime error: {0}")]
    Regime(String),

    /// A series or quadrature failed to meet its tolerance within budget.
    #[error("nonconvergence: {0}")]
    NonConvergence(String),

    /// Evaluation requested at a singular point of the density.
    #[error("singular point: {0}")]
    Singular(String),
}

impl Error {
    /// Machine-readable error category, stable across releases.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Domain(_) | Error::Singular(_) => "domain-error",
            Error::Parameter(_) => "parameter-error",
            Error::Regime(_) => "regime-error",
            Error::NonConvergence(_) => "nonconvergence",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
