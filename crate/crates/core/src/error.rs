use thiserror::Error;

use crate::exprio::SourceSpan;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("direction {direction} out of range 1..={dim}")]
    InvalidDirection { direction: usize, dim: usize },

    #[error("no value assigned to variable {0}")]
    MissingVariable(String),

    #[error("syntax error at {span}: {message}")]
    Syntax { span: SourceSpan, message: String },

    #[error("at {span}: multi-index has {found} entries, expected {expected}")]
    IndexArity {
        span: SourceSpan,
        expected: usize,
        found: usize,
    },

    #[error("at {span}: negative multi-index entry")]
    NegativeIndex { span: SourceSpan },

    #[error("unknown component `{0}`")]
    UnknownComponent(String),

    #[error("duplicate component `{0}`")]
    DuplicateComponent(String),

    #[error("viscosity must be positive, got {0}")]
    InvalidViscosity(String),

    #[error("ansatz needs {required} unknowns, cap is {cap}")]
    AnsatzTooLarge { required: usize, cap: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("malformed serialized data: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
