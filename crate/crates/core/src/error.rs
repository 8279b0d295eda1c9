use alloc::string::String;

/// Failure classes shared by every module.
///
/// The variants line up with the exit codes of the command line tool, so the
/// distinction between them matters: `Input` and `Validation` both end up as
/// validation failures there, `Refused` marks an unsupported mode, and
/// `CapExceeded` a size limit.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! input_err {
    ($($arg:tt)*) => { $crate::error::Error::Input(alloc::format!($($arg)*)) };
}

macro_rules! invalid {
    ($($arg:tt)*) => { $crate::error::Error::Validation(alloc::format!($($arg)*)) };
}

pub(crate) use input_err;
pub(crate) use invalid;
