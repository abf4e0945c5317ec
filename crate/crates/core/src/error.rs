use std::path::PathBuf;

use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("garden has no bamboo")]
    EmptyGarden,

    #[error("rate {index} is {rate}, rates must be strictly positive")]
    NonPositiveRate { index: usize, rate: Rational },

    #[error("rate sum {sum} exceeds budget {budget}")]
    RateSumExceedsBudget { sum: Box<Rational>, budget: Box<Rational> },

    #[error("rate {index} is {rate}, no single cup may receive more than 1 per step")]
    RateAboveOne { index: usize, rate: Rational },

    #[error("index {index} out of range for {len} bamboo")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("count {count} must lie in 1..={len}")]
    PrefixOutOfRange { count: usize, len: usize },

    #[error("horizon must be at least 1")]
    ZeroHorizon,

    #[error("trace is empty")]
    EmptyTrace,

    #[error("malformed trace: {0}")]
    MalformedTrace(String),

    #[error("threshold must be positive, got {0}")]
    NonPositiveThreshold(Rational),

    #[error("deadlines are only defined for heights of at least 1, got {0}")]
    HeightBelowRequest(Rational),

    #[error("{what} must satisfy {constraint}, got {value}")]
    OutOfDomain {
        what: &'static str,
        constraint: &'static str,
        value: String,
    },

    #[error("processor count must be at least 1")]
    ZeroProcessors,

    #[error("{given} choices exceed {processors} processors")]
    TooManyChoices { given: usize, processors: usize },

    #[error("cup {0} chosen more than once in one step")]
    DuplicateChoice(usize),

    #[error("common denominator {0} is too large for the integer engine")]
    ScaleTooLarge(String),

    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("unknown suite {0:?}")]
    UnknownSuite(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl ToString) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            reason: reason.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
