//! Crate-wide error type and result alias.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Requested built-in problem name is not in the catalog.
    #[error("unknown built-in problem `{0}` (expected one of ex1, ex2, ex3, ms1)")]
    UnknownProblem(String),

    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A node or element index is outside its valid range.
    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    /// A coefficient or source field failed to produce a finite value.
    #[error("field `{field}` failed to evaluate at x = {x}: {detail}")]
    FieldEval {
        field: String,
        x: f64,
        detail: String,
    },

    /// Linear algebra or time integration broke down.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Expression text failed to parse.
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    /// Expression evaluation hit a forbidden operation.
    #[error("evaluation error in `{expr}` at x = {x}: {message}")]
    Eval {
        expr: String,
        x: f64,
        message: String,
    },

    /// Reading or writing a file failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    ///
    /// 2 = usage or parse error, 4 = numerical failure during a run.
    /// (Exit 3, validation failure, is not an `Error`: it is a report
    /// with `ok == false` and is handled by the CLI directly.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownProblem(_)
            | Error::InvalidArgument(_)
            | Error::IndexOutOfRange { .. }
            | Error::Syntax { .. }
            | Error::Io(_) => 2,
            Error::FieldEval { .. } | Error::NumericalFailure(_) | Error::Eval { .. } => 4,
        }
    }
}
