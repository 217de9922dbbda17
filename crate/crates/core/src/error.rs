use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("instance too large: {n}^{d} entries exceeds the limit of {limit}")]
    InstanceTooLarge { n: usize, d: usize, limit: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no perfect matching avoids the forbidden edges")]
    Infeasible,

    #[error("{what} requires n <= {max}, got n = {n}")]
    SizeGuard {
        what: &'static str,
        n: usize,
        max: usize,
    },

    #[error("expected a {expected}-dimensional tensor, got d = {got}")]
    Dimension { expected: usize, got: usize },

    #[error("stale augmenting tree: {0}")]
    StaleTree(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
