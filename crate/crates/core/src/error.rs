use thiserror::Error;

/// Errors produced by the forward solver, the operator assembly and the
/// indicator evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("forward solver failed{}: {message} (condition estimate {condition:.3e})",
        .incidence.map(|j| format!(" for incidence {j}")).unwrap_or_default())]
    Solver {
        incidence: Option<usize>,
        message: String,
        condition: f64,
    },

    #[error("degenerate constraint: squared norm {0:.3e} is too small")]
    DegenerateConstraint(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("indicator map is empty")]
    EmptyMap,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
