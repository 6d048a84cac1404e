use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: bad dimensions, indices, permutations or values.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The ambient dimension would exceed the configured cap.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A hypothesis of a construction or criterion does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Serialized data failed to parse or to validate.
    #[error("invalid data: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! arg_err {
    ($($t:tt)*) => { $crate::error::Error::Argument(format!($($t)*)) };
}
pub(crate) use arg_err;
