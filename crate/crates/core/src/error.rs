//! Error type shared by every module in the crate.

use crate::expr::Var;
use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// DSL syntax error; `offset` is a byte position into the source text.
    Parse { offset: usize, message: String },
    /// A function-style identifier the DSL does not know.
    UnknownIdentifier { offset: usize, name: String },
    /// An expression used a variable other than the one it was declared with.
    WrongVariable { offset: usize, expected: Var, found: Var },
    /// Evaluation hit a named parameter with no binding.
    UnboundParameter { name: String },
    /// Pointwise domain violation: division by zero, `log` of a non-positive
    /// number, `sqrt` of a negative number, overflow to infinity, and so on.
    Domain { op: &'static str, at: f64 },
    /// Two operators (or coefficient functions) over different variables.
    VariableMismatch { expected: Var, found: Var },
    /// A model parameter outside the supported region (for example
    /// `omega - alpha - beta <= 0`, a non-positive mass, `nu <= 0`).
    InvalidParameter(String),
    /// Requested functionality that is deliberately not implemented.
    Unsupported(String),
    /// A numerical procedure failed to meet its contract (quadrature did not
    /// converge, a sampling matrix stayed ill-conditioned, an eigenvalue that
    /// was required to be real came out complex, ...).
    Numerics(String),
    /// A point fell outside the domain an object was constructed on.
    OutOfRange { what: &'static str, value: f64, lo: f64, hi: f64 },
}

impl Error {
    pub(crate) fn invalid(message: String) -> Self {
        Error::InvalidParameter(message)
    }

    pub(crate) fn numerics(message: String) -> Self {
        Error::Numerics(message)
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { offset, message } => {
                write!(f, "parse error at byte {offset}: {message}")
            }
            Error::UnknownIdentifier { offset, name } => {
                write!(f, "unknown function `{name}` at byte {offset}")
            }
            Error::WrongVariable { offset, expected, found } => write!(
                f,
                "expression over `{expected}` uses variable `{found}` (byte {offset})"
            ),
            Error::UnboundParameter { name } => write!(f, "parameter `{name}` is not bound"),
            Error::Domain { op, at } => write!(f, "domain error in `{op}` at point {at}"),
            Error::VariableMismatch { expected, found } => {
                write!(f, "operand over `{found}` where `{expected}` was required")
            }
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported: {m}"),
            Error::Numerics(m) => write!(f, "numerical failure: {m}"),
            Error::OutOfRange { what, value, lo, hi } => {
                write!(f, "{what} = {value} outside [{lo}, {hi}]")
            }
        }
    }
}

impl core::error::Error for Error {}
