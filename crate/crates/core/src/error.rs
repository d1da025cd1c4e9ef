use alloc::string::String;
use core::fmt;

/// Errors raised by the witness toolkit.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    Domain(String),
    /// A configuration id that is not one of the built-ins.
    UnknownConfig { id: String, valid: &'static [&'static str] },
    /// A search found a witness above the value it was asked to certify.
    Inconsistent { claimed: f64, found: f64, tolerance: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::UnknownConfig { id, valid } => {
                write!(f, "unknown config id `{id}`; valid ids: ")?;
                for (i, v) in valid.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    f.write_str(v)?;
                }
                Ok(())
            }
            Error::Inconsistent {
                claimed,
                found,
                tolerance,
            } => write!(
                f,
                "search found |W| = {found} above claimed maximum {claimed} (tolerance {tolerance})"
            ),
        }
    }
}

impl core::error::Error for Error {}
