use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument must be non-negative, got {0}")]
    NegativeArgument(f64),

    #[error("value {0} lies above the range of the function; the generalized inverse is unbounded")]
    UnboundedInverse(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid step profile: {0}")]
    InvalidProfile(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("NaN encountered in {0}")]
    NotANumber(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_finite_or_inf(value: f64, context: &'static str) -> Result<f64> {
    if value.is_nan() {
        Err(Error::NotANumber(context))
    } else {
        Ok(value)
    }
}
