use thiserror::Error;

/// Errors raised by the numerical core.
///
/// Configuration problems are reported separately by [`crate::config`]; every
/// variant here is a numerical or shape failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid trap parameters: {0}")]
    InvalidTrap(String),
    #[error("capacity must be a positive integer")]
    ZeroCapacity,
    #[error("energy {energy} has no three turning points (valid range is ({min}, 0))")]
    NoTurningPoints { energy: f64, min: f64 },
    #[error("turning point bracketing failed: {0}")]
    Bracketing(String),
    #[error("grid needs at least 3 points, got {0}")]
    GridTooSmall(usize),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("requested {requested} bound states but only {available} lie below zero")]
    CapacityExceeded { requested: usize, available: usize },
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("absorber width {width} does not fit the grid ({reason})")]
    AbsorberTooWide { width: f64, reason: String },
    #[error("zero pivot in tridiagonal elimination at row {0}")]
    ZeroPivot(usize),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("region cut {cut} lies outside the grid [{x_min}, {x_max}]")]
    CutOutsideGrid { cut: f64, x_min: f64, x_max: f64 },
    #[error("overlap matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("overlap matrix eigenvalue {0} outside [0, 1]")]
    Conditioning(f64),
    #[error("determinant has imaginary residue {0:e}")]
    ComplexDeterminant(f64),
    #[error("Zeno bracket is not positive ({0:e})")]
    NonPositiveBracket(f64),
    #[error("fit needs at least {needed} samples in the window, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("channel increases inside the fit window")]
    IncreasingChannel,
    #[error("channel drops to {0} inside the fit window (must stay above 0.5)")]
    ChannelTooLow(f64),
    #[error("non-positive channel value {0} in the fit window")]
    NonPositiveChannel(f64),
    #[error("time {t} outside the series range [{t0}, {t1}]")]
    OutOfRange { t: f64, t0: f64, t1: f64 },
    #[error("non-positive input: {0}")]
    NonPositive(&'static str),
    #[error("fit window collapsed: {0}")]
    WindowCollapsed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
