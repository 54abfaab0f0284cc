use std::fmt;

/// Errors produced by the linear-algebra kernels, the integrators and the harness.
#[derive(Debug)]
pub enum Error {
    /// An operand has the wrong length or shape.
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    /// An input contains NaN or infinite entries.
    NonFinite {
        context: &'static str,
    },
    /// A direct solve hit an exactly singular matrix.
    SingularMatrix {
        column: usize,
    },
    /// BDF order outside the zero-stable range 1..=6.
    InvalidOrder {
        p: usize,
    },
    /// Inconsistent configuration (k/p mismatch, empty history, bad grid size, ...).
    InvalidInput(String),
    /// An integration step failed; carries the zero-based step index.
    AtStep {
        step: usize,
        source: Box<Error>,
    },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch {
                context,
                expected,
                actual,
            } => write!(
                f,
                "{context}: dimension mismatch (expected {expected}, got {actual})"
            ),
            Error::NonFinite { context } => write!(f, "{context}: non-finite entries"),
            Error::SingularMatrix { column } => {
                write!(f, "exactly singular matrix (zero pivot at column {column})")
            }
            Error::InvalidOrder { p } => {
                write!(f, "BDF order {p} outside the zero-stable range 1..=6")
            }
            Error::InvalidInput(msg) => write!(f, "{msg}"),
            Error::AtStep { step, source } => write!(f, "step {step}: {source}"),
            Error::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::AtStep { source, .. } => Some(source),
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::AtStep {
            step,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
