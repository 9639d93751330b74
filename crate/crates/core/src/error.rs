use std::path::PathBuf;

use thiserror::Error;

use crate::timeseries::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Data,
    Fit,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("missing column `{column}` in header")]
    MissingColumn { column: &'static str },

    #[error("unexpected header `{found}`, expected `{expected}`")]
    UnexpectedHeader {
        found: String,
        expected: &'static str,
    },

    #[error("line {line}, column `{column}`: `{value}` is not a number")]
    NonNumeric {
        line: u64,
        column: &'static str,
        value: String,
    },

    #[error("line {line}: year {found} follows {previous}; missing year {missing}")]
    YearGap {
        line: u64,
        previous: i32,
        found: i32,
        missing: i32,
    },

    #[error("line {line}: duplicate year {year}")]
    DuplicateYear { line: u64, year: i32 },

    #[error("line {line}, column `{column}` (year {year}): value {value} must be finite and > 0")]
    NonPositive {
        line: u64,
        column: &'static str,
        year: i32,
        value: f64,
    },

    #[error("invalid panel: {0}")]
    InvalidPanel(ValidationReport),

    #[error("invalid series `{name}`: {reason}")]
    InvalidSeries { name: String, reason: String },

    #[error("year range [{from}, {to}] is outside [{start}, {end}] or shorter than 3 years")]
    YearRange {
        from: i32,
        to: i32,
        start: i32,
        end: i32,
    },

    #[error("year ranges differ: [{left_start}, {left_end}] vs [{right_start}, {right_end}]")]
    YearRangeMismatch {
        left_start: i32,
        left_end: i32,
        right_start: i32,
        right_end: i32,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {required} points, got {got}")]
    TooFewPoints { required: usize, got: usize },

    #[error("regressor has zero variance")]
    DegenerateRegressor,

    #[error("objective is not finite at x = {x}")]
    NonFiniteObjective { x: f64 },

    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "population is not growing hyperbolically on [{from}, {to}] (slope of 1/N is {slope})"
    )]
    NotHyperbolic { from: i32, to: i32, slope: f64 },

    #[error("projection year {year} is not before the singularity t_s = {t_singularity}")]
    BeyondSingularity { year: i32, t_singularity: f64 },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } => ErrorKind::Io,
            Error::Csv { .. }
            | Error::MissingColumn { .. }
            | Error::UnexpectedHeader { .. }
            | Error::NonNumeric { .. }
            | Error::YearGap { .. }
            | Error::DuplicateYear { .. }
            | Error::NonPositive { .. }
            | Error::InvalidPanel(_)
            | Error::InvalidSeries { .. }
            | Error::YearRange { .. }
            | Error::YearRangeMismatch { .. } => ErrorKind::Data,
            Error::LengthMismatch { .. }
            | Error::TooFewPoints { .. }
            | Error::DegenerateRegressor
            | Error::NonFiniteObjective { .. }
            | Error::InvalidBracket { .. }
            | Error::InvalidParameter(_)
            | Error::NotHyperbolic { .. }
            | Error::BeyondSingularity { .. } => ErrorKind::Fit,
        }
    }
}
