use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent caller input.
    #[error("input error: {0}")]
    Input(String),

    /// A size limit was exceeded.
    #[error("resource error: {what} = {value} exceeds cap {cap}")]
    Resource {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    /// Something that should be impossible by construction.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn check_cap(what: &'static str, value: usize, cap: usize) -> Result<()> {
    if value > cap {
        Err(Error::Resource { what, value, cap })
    } else {
        Ok(())
    }
}
