use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("expected a {expected} noise spec, got {got}")]
    KindMismatch {
        expected: &'static str,
        got: &'static str,
    },
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("not enough data: {0}")]
    InsufficientData(String),
    #[error("not a valid density matrix: {0}")]
    InvalidState(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite, got {v}")))
    }
}

pub(crate) fn check_positive(name: &'static str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be > 0, got {v}")))
    }
}

pub(crate) fn check_non_negative(name: &'static str, v: f64) -> Result<()> {
    check_finite(name, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be >= 0, got {v}")))
    }
}
