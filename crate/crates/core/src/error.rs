use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("Fock level {n} out of range for dimension {d}")]
    OutOfRange { n: usize, d: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("integration diverged at t = {t}")]
    Divergence { t: f64 },

    #[error("outcome probability {p} is negative beyond tolerance")]
    PositivityViolation { p: f64 },

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),
}
