use thiserror::Error;

/// Errors produced by the scattering, phase-time and measurement routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Frequency (or energy) at or below the lowest propagating cutoff.
    #[error(
        "evanescent regime: omega = {omega:.6e} rad/s is not above the cutoff {cutoff:.6e} rad/s"
    )]
    Evanescent { omega: f64, cutoff: f64 },

    #[error("singular {size}x{size} system in coefficient solve")]
    SingularSystem { size: usize },

    #[error(
        "phase unwrap ambiguous between samples {index} and {next}: jump is exactly pi, use a denser grid",
        next = index + 1
    )]
    UnwrapAmbiguity { index: usize },

    #[error("empty or degenerate range for {0}")]
    EmptyRange(&'static str),

    #[error("packet spectrum reaches {lowest_hz:.6e} Hz, below the cutoff {cutoff_hz:.6e} Hz")]
    SpectrumBelowCutoff { lowest_hz: f64, cutoff_hz: f64 },

    #[error("ill-posed peak refinement, candidate peak times (s): {candidates:?}")]
    IllPosedPeak { candidates: Vec<f64> },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("trace validation failed: {0}")]
    Validation(String),

    #[error("frequency axes differ: {0}")]
    AxisMismatch(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
