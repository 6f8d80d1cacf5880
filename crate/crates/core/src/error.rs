use thiserror::Error;

/// Errors raised by the co-existence toolkit.
///
/// The variants map one-to-one onto the CLI exit-code classes: domain and
/// contract errors are validation failures, refusals and budget overruns are
/// deliberate "will not compute" answers, and I/O covers file emission.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs are individually valid but inconsistent with each other
    /// (e.g. a co-existence level that does not exist for a scenario).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The operation is well defined but deliberately not provided for
    /// these inputs.
    #[error("refused: {0}")]
    Refused(String),

    /// A run would sample more gains than the configured budget allows.
    #[error("budget exceeded: run needs about {needed} sampled gains, budget is {budget}")]
    Budget { needed: u64, budget: u64 },

    /// A numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

pub(crate) fn refused(msg: impl Into<String>) -> Error {
    Error::Refused(msg.into())
}
