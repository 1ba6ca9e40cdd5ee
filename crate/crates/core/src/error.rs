use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The input does not satisfy an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The grid is too coarse for the requested construction.
    #[error("under-resolved: {0}")]
    Resolution(String),

    /// A frequency-space covering does not reach part of a spectrum.
    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("time step {dt} exceeds CFL limit {limit}")]
    StepSize { dt: f64, limit: f64 },

    #[error("solution diverged at t = {t}")]
    Divergence { t: f64 },

    #[error("trajectory of seed {seed} left the safe region at t = {t}")]
    DomainExit { seed: usize, t: f64 },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}
