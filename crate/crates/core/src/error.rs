use thiserror::Error;

/// Errors raised by the estimators, the test and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("series too short: need at least {needed} observations, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("lag {lag} out of range for length {len}")]
    LagOutOfRange { lag: usize, len: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("degenerate scale estimate: {context} (diagnostics: {diagnostics:?})")]
    DegenerateScale {
        context: String,
        diagnostics: Vec<crate::Diagnostic>,
    },

    #[error("non-stationary autoregressive coefficients {0:?}")]
    NonStationary(Vec<f64>),

    #[error("unknown model id {0}")]
    UnknownModel(u8),

    #[error("{0}")]
    Data(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
