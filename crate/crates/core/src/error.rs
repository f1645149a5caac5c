use thiserror::Error;

/// Failure modes shared across modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("singular derivative at ({re}, {im})")]
    SingularDerivative { re: f64, im: f64 },
    #[error("unsupported region at ({re}, {im}): {reason}")]
    UnsupportedRegion { re: f64, im: f64, reason: String },
    #[error("support touches the grid boundary ({0} nonzero boundary samples)")]
    Padding(usize),
    #[error("iteration diverged after {iterations} steps (change {change:e})")]
    Divergence { iterations: usize, change: f64 },
    #[error("out of regime: {0}")]
    OutOfRegime(String),
    #[error("no admissible index up to {horizon}: {binding}")]
    Horizon { horizon: usize, binding: String },
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn unsupported(re: f64, im: f64, reason: impl Into<String>) -> Self {
        Error::UnsupportedRegion { re, im, reason: reason.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
