use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("budget exceeded: {what} needs {required}, cap is {cap}")]
    BudgetExceeded {
        what: &'static str,
        required: u128,
        cap: u128,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("eigensolver did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("vacuous gap: eta = {0} is not below 1")]
    VacuousGap(f64),
    #[error("not a Fourier-type pair: {0}")]
    NotFourierType(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
