use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polygonal order {0} is below 3")]
    OrderTooSmall(u32),
    #[error("coefficient must be positive")]
    ZeroCoefficient,
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error("local density at p={p} did not stabilize within budget")]
    NonStabilized { p: u64 },
    #[error("{0}")]
    Invalid(String),
    #[error("unknown claim id `{0}`")]
    UnknownClaim(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 1 is reserved for failed checks,
    /// 2 for usage errors, 3 for exceeded budgets.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget(_) | Error::NonStabilized { .. } => 3,
            Error::Parse { .. } | Error::UnknownClaim(_) => 2,
            _ => 2,
        }
    }
}
