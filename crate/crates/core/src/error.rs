use thiserror::Error;

use crate::quadrature::QuadratureError;

#[derive(Debug, Error)]
pub enum Error {
    /// One or more configuration invariants failed. Every violation is listed.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("order statistic index {order} outside 1..={users}")]
    Order { order: usize, users: usize },

    #[error("user index {user} outside 1..={users}")]
    User { user: usize, users: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    /// The finite-sum evaluation lost too many digits to be trusted.
    #[error(
        "catastrophic cancellation: term magnitude {magnitude:e} against result {value:e} \
         (estimated error {estimated_error:e})"
    )]
    Cancellation {
        value: f64,
        magnitude: f64,
        estimated_error: f64,
    },

    /// Users must share one fading law for the order-statistic expressions.
    #[error("analytic evaluation requires identically distributed users: {0}")]
    NonIdenticalUsers(String),

    /// A cross-method consistency check failed on computed results.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("config parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the command-line front end: 1 for bad input,
    /// 2 for numerical failure, 3 for an invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Quadrature(_) | Error::Cancellation { .. } => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
