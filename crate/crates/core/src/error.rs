use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNormExceeded(f64),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("effects do not sum to identity (deviation {0:e})")]
    CompletenessViolated(f64),

    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),

    #[error("{component}: {reason}")]
    InvalidStrategy { component: String, reason: String },

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("{0}")]
    Domain(String),

    #[error("witness pair ({w_ab}, {w_ac}) is outside the quantum set: sharpness lower bound {lower} exceeds upper bound {upper}")]
    InfeasiblePair {
        w_ab: f64,
        w_ac: f64,
        lower: f64,
        upper: f64,
    },

    #[error("optimizer failed to converge: {0}")]
    ConvergenceFailure(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(component: impl Into<String>, reason: impl ToString) -> Self {
        Error::InvalidStrategy {
            component: component.into(),
            reason: reason.to_string(),
        }
    }

    /// Prefixes the component path of an `InvalidStrategy` error, or wraps any
    /// other error as an invalid component.
    pub fn at(self, component: &str) -> Self {
        match self {
            Error::InvalidStrategy {
                component: inner,
                reason,
            } => Error::InvalidStrategy {
                component: format!("{component}.{inner}"),
                reason,
            },
            other => Error::invalid(component, other),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
