use thiserror::Error;

/// Error taxonomy shared by every module. The CLI maps these onto exit
/// codes: invariant violations -> 1, invalid arguments/domain -> 2,
/// resource refusals -> 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated. The message names the
    /// violated constraint verbatim.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The mathematical domain of a formula excludes the inputs.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested computation exceeds a configured resource cap.
    #[error("resource refusal: {0}")]
    ResourceRefusal(String),

    /// An unconditional invariant of the construction failed; this means
    /// a bug, not a property of the parameters.
    #[error("construction invariant violated: {0}")]
    ConstructionBug(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::InvalidArgument(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Error {
        Error::Domain(msg.into())
    }
    pub fn refusal(msg: impl Into<String>) -> Error {
        Error::ResourceRefusal(msg.into())
    }

    /// Exit code the CLI should report for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConstructionBug(_) => 1,
            Error::InvalidArgument(_) | Error::Domain(_) => 2,
            Error::ResourceRefusal(_) => 3,
        }
    }
}
