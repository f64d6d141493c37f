use thiserror::Error;

/// Errors raised by parsing, map construction and the splice/search operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("empty code")]
    EmptyCode,
    #[error("label `{label}` occurs {count} time(s), expected exactly 2")]
    LabelCount { label: String, count: usize },
    #[error("label `{0}` carries inconsistent signs")]
    InconsistentSign(String),
    #[error("signed code has no spherical realization (V - E + F = {euler}, expected {expected})")]
    NotRealizable { euler: i64, expected: i64 },
    #[error("unknown crossing label {0}")]
    UnknownCrossing(u32),
    #[error("invalid dart {0}")]
    InvalidDart(String),
    #[error("operation requires a single-component projection, found {0} components")]
    MultiComponent(usize),
    #[error("crossings must be distinct")]
    IdenticalCrossings,
    #[error("darts do not lie on a common face")]
    NotOnCommonFace,
    #[error("darts lie on the same edge")]
    SameEdge,
    #[error("S+ on the simple closed curve is degenerate; use RI+")]
    DegenerateOnO,
    #[error("reconnection would produce {0} components")]
    WouldDisconnect(usize),
    #[error("twist length must be at least 1")]
    BadTwistLength,
    #[error("state does not match the projection: {0}")]
    StateMismatch(String),
    #[error("parameter out of range: {0}")]
    ParameterRange(String),
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("witness is not a valid pure-descent witness: {0}")]
    BadWitness(String),
    #[error("malformed record on line {line}: {msg}")]
    Record { line: usize, msg: String },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("csv error: {0}")]
    Csv(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
