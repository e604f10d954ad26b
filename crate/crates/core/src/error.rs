use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by a non-constant expression: {0}")]
    DivisionByExpr(String),
    #[error("exponent error: {0}")]
    Exponent(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("missing assignment for {0}")]
    MissingAssignment(String),
    #[error("name collision: {0}")]
    NameCollision(String),
    #[error("system has no solved form")]
    NoSolvedForm,
    #[error("solved rule violates the ranking condition: {0}")]
    NonTerminatingRule(String),
    #[error("not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("zero weight: {0}")]
    ZeroWeight(String),
    #[error("equation depends on derivatives of parameter {0}")]
    DerivativeOfParameter(String),
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier {0}")]
    UnknownIdentifier(String),
    #[error("schema error at {path}: {msg}")]
    Schema { path: String, msg: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("i/o error: {0}")]
    Io(String),
}
