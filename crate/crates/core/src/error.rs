use thiserror::Error;

/// Errors raised while building or evaluating a model.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported Lie algebra {series}{rank}")]
    Unsupported { series: String, rank: usize },

    #[error("invalid automorphism: {0}")]
    Automorphism(String),

    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("evaluation at a pole: {0}")]
    Pole(String),

    #[error("element of degree {0} is beyond the supported degree 2")]
    Degree(usize),

    #[error("mode {0} cannot be realized on the tensor product module")]
    Unrealizable(String),

    #[error("vector is not in the fixed-point subalgebra (residual {0:.3e})")]
    NotInFixedSubalgebra(f64),

    #[error("weight block enumeration exceeded the safety cap of {cap} vectors")]
    BlockTooLarge { cap: usize },

    #[error("operator maps outside the weight block: {0}")]
    OffBlock(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error comes from invalid input rather than a failed computation.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::Unsupported { .. }
                | Error::Automorphism(_)
                | Error::Json(_)
        )
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
