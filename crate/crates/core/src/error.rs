use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpsError {
    #[error("distribution has an empty support")]
    EmptySupport,

    #[error("masses sum to {0}, expected exactly 1")]
    NotNormalized(String),

    #[error("negative mass {mass} for symbol {label:?}")]
    NegativeMass { label: String, mass: String },

    #[error("duplicate symbol {0:?}")]
    DuplicateLabel(String),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("relative entropy is infinite: q({0:?}) = 0 where p is positive")]
    DivergenceInfinite(String),

    #[error("value {0} out of range [0, 1]")]
    OutOfRange(f64),

    #[error("variable groups overlap")]
    OverlappingGroups,

    #[error("unknown variable index {0}")]
    UnknownVariable(usize),

    #[error("partition cell {index} has size zero")]
    ZeroPsi { index: usize },

    #[error("theta = {theta} too small: floor(P_U({label}) * theta) = 0")]
    ThetaTooSmall { theta: u64, label: String },

    #[error("arity must be between 2 and 36, got {0}")]
    BadArity(u32),

    #[error("prefix code does not cover symbol {0:?}")]
    CodeMismatch(String),

    #[error("symbol index {index} out of range for {alphabet} alphabet of size {size}")]
    OutOfAlphabet {
        alphabet: &'static str,
        index: usize,
        size: usize,
    },

    #[error("(r, x) = ({r}, {x}) has zero probability")]
    InvalidPair { r: String, x: String },

    #[error("system is not EPS: {0} fails")]
    NotEps(String),

    #[error("regime precondition unmet: {0}")]
    RegimePrecondition(String),

    #[error("enumeration budget exceeded: {what} = {value} > cap {cap}")]
    BudgetExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("parameter {name} = {value} invalid: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: &'static str,
    },

    #[error("context mismatch: {0}")]
    ContextMismatch(String),

    #[error("residual key too small: {0}")]
    KeyTooSmall(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, EpsError>;
