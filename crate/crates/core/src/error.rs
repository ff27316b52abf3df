//! Error type shared by every model and loader in the crate.

use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value violated a precondition or a type invariant.
    #[error("invalid {field}: {reason}")]
    InvalidInput { field: String, reason: String },

    #[error("series lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("series `{0}` has zero variance, correlation is undefined")]
    ZeroVariance(String),

    #[error("{0} must not be empty")]
    Empty(String),

    #[error("{path}: line {line}: {message}")]
    Malformed {
        path: String,
        line: u64,
        message: String,
    },

    #[error("{path}: unknown column `{column}`")]
    UnknownColumn { path: String, column: String },

    #[error("{path}: missing required column `{column}`")]
    MissingColumn { path: String, column: String },

    #[error("{path}: duplicate date {date} at line {line}")]
    DuplicateDate {
        path: String,
        date: NaiveDate,
        line: u64,
    },

    #[error("{path}: date {date} at line {line} is earlier than the previous row")]
    NonMonotonicDate {
        path: String,
        date: NaiveDate,
        line: u64,
    },

    #[error("line {line}: unknown scenario key `{key}`")]
    UnknownKey { key: String, line: u64 },

    #[error("missing required scenario key `{0}`")]
    MissingKey(String),

    #[error("`{key}` references unknown hardware `{name}`")]
    DanglingHardware { key: String, name: String },

    #[error("daily series has gaps, missing dates: {}", join_dates(.0))]
    MissingDates(Vec<NaiveDate>),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the environment (missing file, permissions) as
    /// opposed to bad content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

fn join_dates(dates: &[NaiveDate]) -> String {
    dates
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Rejects NaN/infinite values and anything outside `pred`.
pub(crate) fn check(
    field: &str,
    value: f64,
    pred: impl Fn(f64) -> bool,
    rule: &str,
) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::invalid(
            field,
            format!("{value} is not a finite number"),
        ));
    }
    if !pred(value) {
        return Err(Error::invalid(field, format!("{value} violates {rule}")));
    }
    Ok(value)
}
