use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid level basis: {0}")]
    InvalidBasis(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("cannot parse quantity {input:?}: {reason}")]
    Unit { input: String, reason: String },

    #[error("inconsistent coherence budget: {0}")]
    InconsistentBudget(String),

    #[error("fit `{model}` failed: {reason}")]
    Fit { model: String, reason: String },

    #[error("shot {shot}: {source}")]
    Shot { shot: u64, source: Box<Error> },
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.into(), reason: reason.into() }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { field: field.into(), reason: reason.into() }
    }

    pub(crate) fn fit(model: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Fit { model: model.into(), reason: reason.into() }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Fit { .. } | Error::NotHermitian(_) | Error::InvalidDensity(_) => true,
            Error::Shot { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
