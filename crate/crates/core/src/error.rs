use thiserror::Error;

/// Failure modes shared by every layer of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("input error: {0}")]
    Input(String),
    /// The working precision is too small to certify the requested quantity.
    #[error("precision exhausted: {0}")]
    Precision(String),
    /// A construction step could not be carried out (ladder stall, missing skeleton, ...).
    #[error("construction failed: {0}")]
    Construction(String),
    /// A checked identity failed.
    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::Precision(_) => 3,
            Error::Construction(_) | Error::Verification(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Precision(_) => "precision",
            Error::Construction(_) => "construction",
            Error::Verification(_) => "verification",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! input_err {
    ($($arg:tt)*) => { $crate::error::Error::Input(format!($($arg)*)) };
}
macro_rules! precision_err {
    ($($arg:tt)*) => { $crate::error::Error::Precision(format!($($arg)*)) };
}
macro_rules! construction_err {
    ($($arg:tt)*) => { $crate::error::Error::Construction(format!($($arg)*)) };
}
pub(crate) use {construction_err, input_err, precision_err};
