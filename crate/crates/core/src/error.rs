use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A size parameter was zero, negative or not finite.
    DegenerateSize {
        what: &'static str,
        value: f64,
    },
    /// Wrong number of size or detector parameters for the domain kind.
    ParameterCount {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// Fewer than two detectors along some face axis.
    TooFewDetectors {
        found: usize,
    },
    Unsupported(String),
    /// The folding loop hit its iteration cap.
    FoldDidNotTerminate {
        steps: usize,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    TooFewSamples {
        needed: usize,
        found: usize,
    },
    /// A radius/time lookup fell outside the sampled range.
    OutOfRange {
        what: &'static str,
        value: f64,
        limit: f64,
    },
    ShapeMismatch {
        left: usize,
        right: usize,
    },
    InvalidGrid(&'static str),
    /// The dataset does not belong to the domain it is paired with.
    DomainMismatch,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateSize { what, value } => {
                write!(f, "degenerate {what}: {value} (must be finite and > 0)")
            }
            Error::ParameterCount {
                what,
                expected,
                found,
            } => write!(f, "expected {expected} {what}, found {found}"),
            Error::TooFewDetectors { found } => {
                write!(f, "need at least 2 detectors per face axis, found {found}")
            }
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::FoldDidNotTerminate { steps } => {
                write!(
                    f,
                    "reflection folding did not terminate after {steps} steps"
                )
            }
            Error::DimensionMismatch { expected, found } => {
                write!(
                    f,
                    "dimension mismatch: expected {expected}D, found {found}D"
                )
            }
            Error::TooFewSamples { needed, found } => {
                write!(f, "need at least {needed} radial samples, found {found}")
            }
            Error::OutOfRange { what, value, limit } => {
                write!(f, "{what} {value} exceeds the sampled range {limit}")
            }
            Error::ShapeMismatch { left, right } => {
                write!(f, "shape mismatch: {left} vs {right} values")
            }
            Error::InvalidGrid(why) => write!(f, "invalid grid: {why}"),
            Error::DomainMismatch => f.write_str("dataset and domain do not match"),
        }
    }
}
