use thiserror::Error;

/// Errors raised anywhere in the invariant pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: operands live in different number fields")]
    FieldMismatch,
    #[error("degree cap exceeded: {what} has degree {degree}, cap is {cap}")]
    DegreeCap {
        what: &'static str,
        degree: usize,
        cap: usize,
    },
    #[error("field is not stable under complex conjugation")]
    NotConjugationStable,
    #[error("root isolation failed: {0}")]
    RootIsolation(String),
    #[error("Groebner step budget of {0} exceeded")]
    StepBudget(usize),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("unsupported eigenvalue field: {0}")]
    UnsupportedEigenvalueField(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid model: {0}")]
    Semantic(String),
    #[error("requires numeric constant: {0}")]
    RequiresNumericConstant(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
