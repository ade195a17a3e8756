use alloc::string::String;
use thiserror::Error;

/// Coarse error classification, used by callers that map failures to process
/// exit codes (bad input vs numerical breakdown).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },

    #[error("need at least 2 groups, got {0}")]
    TooFewGroups(usize),

    #[error("group {index} has {size} points, need at least {min}")]
    GroupTooSmall {
        index: usize,
        size: usize,
        min: usize,
    },

    #[error("subsample block for group {index} would have {size} points, need at least 2")]
    BlockTooSmall { index: usize, size: usize },

    #[error("degenerate spectrum: no positive eigenvalue survives truncation")]
    DegenerateSpectrum,

    #[error("eigensolver did not converge")]
    EigenFailure,

    #[error("eigenvalue {value:e} is below the PSD tolerance -{tolerance:e}")]
    IndefiniteGram { value: f64, tolerance: f64 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::DegenerateSpectrum | Error::EigenFailure | Error::IndefiniteGram { .. } => {
                ErrorKind::Numeric
            }
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
