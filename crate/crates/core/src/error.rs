use std::path::PathBuf;

use thiserror::Error;

use crate::lattice::LatticeKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size {size} for {kind} lattice: must be at least 2")]
    InvalidSize { kind: LatticeKind, size: usize },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("coordinate ({x}, {y}) is not on the lattice")]
    OffLattice { x: u32, y: u32 },

    #[error("shortest-path count overflows 64 bits: C({n}, {k})")]
    CountOverflow { n: u64, k: u64 },

    #[error("inconsistent input: {0}")]
    Consistency(String),

    #[error("no crossing found between N={0} and N={1} inside the transition window")]
    NoCrossing(usize, usize),

    #[error("curves for N={0} and N={1} coincide over the transition window")]
    DegenerateCrossing(usize, usize),

    #[error("transformed curves share no common x range")]
    InsufficientOverlap,

    #[error("exponent fit failed: {0}")]
    Fit(String),

    #[error("invalid configuration: {0}")]
    Usage(String),

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.to_string(),
        }
    }

    /// Process exit code: 2 usage, 3 data/consistency, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::InvalidSize { .. } => 2,
            Error::Io { .. } => 4,
            _ => 3,
        }
    }
}
