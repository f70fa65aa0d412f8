use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("not a Dirac structure: {0}")]
    NotDirac(String),
    #[error("degenerate form: {0}")]
    Degenerate(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("internal cross-check failed: {0}")]
    CrossCheck(String),
    #[error("value outside double range: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Dimension(what()))
    }
}
