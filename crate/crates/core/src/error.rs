use thiserror::Error;

/// Everything that can go wrong while building groups, rings or genus counts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported matrix size {0}: determinants are only computed for sizes 1..=4")]
    UnsupportedSize(usize),

    #[error("resource limit: {what} needs {needed} elements but the enumeration cap is {cap}")]
    ResourceLimit {
        what: String,
        needed: u128,
        cap: usize,
    },

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn limit(what: impl Into<String>, needed: u128, cap: usize) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            needed,
            cap,
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Upper bound on the number of elements any enumeration may store or scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub cap: usize,
}

impl Limits {
    pub const DEFAULT_CAP: usize = 2_000_000;

    pub fn with_cap(cap: usize) -> Self {
        Limits { cap }
    }

    pub(crate) fn ensure(&self, what: &str, needed: u128) -> Result<()> {
        if needed > self.cap as u128 {
            Err(Error::limit(what, needed, self.cap))
        } else {
            Ok(())
        }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            cap: Self::DEFAULT_CAP,
        }
    }
}
