use thiserror::Error;

/// Failures reported by the library.
///
/// `Budget` and `Invalid` are recoverable input problems; `Consistency` means
/// an identity that must hold exactly did not, and is never expected.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("budget exceeded: {what} needs {needed}, limit is {limit}")]
    Budget {
        what: &'static str,
        needed: String,
        limit: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("degenerate form: {0}")]
    Degenerate(String),
    #[error("CRT modulus too small: need more than {required_bits} bits, have {available_bits}")]
    CrtInsufficient {
        required_bits: u64,
        available_bits: u64,
    },
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

pub(crate) fn budget<T>(what: &'static str, needed: impl ToString, limit: impl ToString) -> Result<T> {
    Err(Error::Budget {
        what,
        needed: needed.to_string(),
        limit: limit.to_string(),
    })
}
