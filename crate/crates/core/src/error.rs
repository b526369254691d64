use thiserror::Error;

/// Errors raised by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside the domain where a constant or inequality is defined.
    #[error("{what}: requires {requirement}")]
    Domain { what: String, requirement: String },

    /// Axis index outside `0..dim`.
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    /// Dimensions of two operands disagree.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A singular weight was applied to a function that does not vanish at the origin.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The requested computation exceeds the configured size budget.
    #[error("resource budget exceeded: {what} needs {required}, budget is {budget}")]
    Resource { what: String, required: u128, budget: u128 },

    /// An iterative method did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    /// Malformed or inconsistent arguments.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Malformed lattice-function text input.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: impl Into<String>, requirement: impl Into<String>) -> Self {
        Error::Domain {
            what: what.into(),
            requirement: requirement.into(),
        }
    }
}
