use thiserror::Error;

/// Errors raised by the counting, reconstruction and diagnostics layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("coefficient domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("unsupported model: {0}")]
    Unsupported(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Resource(_) | Error::Precision(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
pub(crate) use domain_err;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_split_input_from_resource_errors() {
        assert_eq!(Error::Parse("x".into()).exit_code(), 2);
        assert_eq!(Error::Domain("x".into()).exit_code(), 2);
        assert_eq!(Error::Unsupported("x".into()).exit_code(), 2);
        assert_eq!(Error::Resource("x".into()).exit_code(), 3);
        assert_eq!(Error::Precision("x".into()).exit_code(), 3);
        assert_eq!(domain_err!("p = {}", 4), Error::Domain("p = 4".into()));
        assert_eq!(Error::Precision("two".into()).to_string(), "precision error: two");
    }
}
