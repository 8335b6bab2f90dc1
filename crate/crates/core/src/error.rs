//! Crate-wide error type.
//!
//! Operations validate dimensions, alphabets, and structural preconditions at
//! their boundaries and report violations through [`Error`] rather than
//! panicking. Enumeration-heavy probes additionally enforce explicit guards
//! and surface [`Error::GuardExceeded`] instead of running away.

use thiserror::Error;

use crate::geometry::CellVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("alphabet mismatch: expected size {expected}, found {found}")]
    AlphabetMismatch { expected: u32, found: u32 },

    #[error("symbol {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: u32 },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("a cell vector must have at least one coordinate")]
    ZeroDimension,

    #[error("ball enumeration over an empty base set is undefined")]
    EmptyCellSet,

    #[error("supports overlap at {cell}")]
    SupportOverlap { cell: CellVector },

    #[error("period {period} is smaller than the axis extent {extent}")]
    PeriodTooSmall { extent: i64, period: i64 },

    #[error("period must be positive, got {period}")]
    NonPositivePeriod { period: i64 },

    #[error("background unstable: symbol 0 is not quiescent under this rule")]
    BackgroundUnstable,

    #[error("cannot step an overlay that mixes finite and periodic parts; evaluate it through a probe instead")]
    UnsteppableOverlay,

    #[error("{what} guard exceeded: the run needs {needed}, the guard allows {guard}")]
    GuardExceeded {
        what: &'static str,
        needed: u128,
        guard: u128,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown fixture `{name}`")]
    UnknownFixture { name: String },

    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
