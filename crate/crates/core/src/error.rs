use thiserror::Error;

/// Errors raised by the library. Each variant belongs to one of two exit
/// classes used by the command line front end: input errors (exit 1) and
/// numeric or capacity errors (exit 2).
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Input(String),

    /// A precondition on the value of an argument was violated.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {message} (residual {residual:e})")]
    Numeric { message: String, residual: f64 },

    #[error("capacity exceeded: {what} needs {requested}, cap is {cap}")]
    Capacity {
        what: String,
        requested: usize,
        cap: usize,
    },

    /// Two criteria that must agree mathematically disagreed numerically.
    #[error("consistency error: {check}: {left} vs {right}")]
    Consistency {
        check: String,
        left: String,
        right: String,
    },

    #[error("not a causal linear part: {0}")]
    NotCausal(String),

    #[error("anticausal: reverses time orientation")]
    Anticausal,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::Input(_)
            | Error::Domain(_)
            | Error::Io(_)
            | Error::Json(_) => 1,
            Error::Numeric { .. }
            | Error::Capacity { .. }
            | Error::Consistency { .. }
            | Error::NotCausal(_)
            | Error::Anticausal => 2,
        }
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Input(_) => "input",
            Error::Domain(_) => "domain",
            Error::Numeric { .. } => "numeric",
            Error::Capacity { .. } => "capacity",
            Error::Consistency { .. } => "consistency",
            Error::NotCausal(_) => "not_causal",
            Error::Anticausal => "anticausal",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, got })
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
