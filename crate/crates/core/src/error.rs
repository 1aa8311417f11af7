//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by simulation, imaging and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A steering vector evaluated to zero and cannot be normalized.
    #[error("degenerate steering vector: {0}")]
    DegenerateSteering(String),

    /// Noise calibration is impossible because the signal matrix is identically zero.
    #[error("cannot calibrate SNR: signal matrix is identically zero")]
    CannotCalibrateSnr,

    /// MUSIC needs at least one noise-subspace vector.
    #[error("empty noise subspace: signal rank {m_hat} fills all {n_obs} observation dimensions")]
    EmptyNoiseSubspace { m_hat: usize, n_obs: usize },

    /// A scenario constraint failed; `path` addresses the offending field.
    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    /// A document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by a bad scenario or bad arguments, as opposed
    /// to I/O or internal failures. The CLI maps these to exit code 2.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_) | Error::Validation { .. } | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
