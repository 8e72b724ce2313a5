use std::fmt;

/// Errors produced by the toolkit.
///
/// Variants split into validation problems (bad inputs, impossible
/// parameters) and everything else; [`Error::is_validation`] tells them
/// apart so front ends can pick an exit status.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("similarity matrix is not symmetric at ({0}, {1})")]
    Asymmetry(usize, usize),

    #[error("matrix entry ({row}, {col}) = {value} is outside {range}")]
    OutOfRange {
        row: usize,
        col: usize,
        value: f64,
        range: &'static str,
    },

    #[error("matrix has {got} entries, expected {expected}")]
    Shape { expected: usize, got: usize },

    #[error("label {label} at point {point} is outside 1..={k}")]
    BadLabel { point: usize, label: usize, k: usize },

    #[error(
        "noise parameters too large: need 6(alpha+nu)n + 1 <= n - 1, \
         got t_init = {t_init} with n = {n}"
    )]
    ParamsTooLarge { t_init: usize, n: usize },

    #[error("noise fraction {name} = {value} must lie in [0, 1)")]
    BadFraction { name: &'static str, value: f64 },

    #[error("pruning nodes overlap at point {0}")]
    Overlap(usize),

    #[error("pruning does not cover point {0}")]
    Coverage(usize),

    #[error("unknown tree node {0}")]
    UnknownNode(usize),

    #[error("pruning size {k} exceeds the {leaves} leaves of the tree")]
    KTooLarge { k: usize, leaves: usize },

    #[error("no non-singleton blob to attach singletons to")]
    NoNonSingletonBlob,

    #[error("subset for point {point} is invalid: {reason}")]
    SubsetInvalid { point: usize, reason: String },

    #[error("instance failed certification after {attempts} attempts")]
    CertificationFailed { attempts: usize },

    #[error("noise kind {kind} does not apply to {data}")]
    KindMismatch {
        kind: &'static str,
        data: &'static str,
    },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("length mismatch: {what} has {got}, expected {expected}")]
    Length {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the caller's input rather than by a fault
    /// inside the toolkit.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::CertificationFailed { .. })
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            column,
            message: message.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
