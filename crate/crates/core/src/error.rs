//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Real/categorical mismatch between a model output and a loss or label.
    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    /// A stated precondition was violated (empty dataset, trials too low, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Normal equations are singular and no ridge penalty was supplied.
    #[error("singular system: regularization required (lambda = 0 on a rank-deficient design)")]
    RegularizationRequired,

    /// A loss exceeded the bound its `LossSpec` promised.
    #[error("loss contract violated: {0}")]
    LossContract(String),

    /// Threshold adversary asked for sigma_D <= sigma_S in known-sigma mode.
    #[error("degenerate threshold: sigma_D ({sigma_d}) must exceed sigma_S ({sigma_s})")]
    DegenerateThreshold { sigma_s: f64, sigma_d: f64 },

    /// Feature or response does not fit in the declared encoding width.
    #[error("encoding domain too small: {0}")]
    DomainTooSmall(String),

    /// Requested conditional is not computable for this distribution kind.
    #[error("not computable: {0}")]
    NotComputable(String),

    /// Experiment configuration rejected before any trial ran.
    #[error("config error: {0}")]
    Config(String),
}
