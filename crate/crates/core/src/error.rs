use std::path::PathBuf;

use crate::span::{Granularity, Span};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid span ({start}, {end}): start must not exceed end")]
    InvalidSpan { start: usize, end: usize },

    #[error("span {span} out of range for {n_units} units")]
    SpanOutOfRange { span: Span, n_units: usize },

    #[error("context has no units")]
    EmptyContext,

    #[error("gold answer covers {gold} units but the context has {context}")]
    GoldUnitMismatch { gold: usize, context: usize },

    #[error("prediction has {pred} units but gold has {gold}")]
    UnitCountMismatch { pred: usize, gold: usize },

    #[error("cannot evaluate an empty corpus")]
    EmptyCorpus,

    #[error("duplicate instance id {0:?}")]
    DuplicateId(String),

    #[error("granularity mismatch: expected {expected}, found {found}")]
    GranularityMismatch { expected: Granularity, found: Granularity },

    #[error("display offset must be 0 or 1, got {0}")]
    InvalidOffset(u64),

    #[error("token budget must be at least 1")]
    InvalidBudget,

    #[error("instance {0:?} has no gold answer")]
    MissingGold(String),

    #[error("record {index}: field `{field}`: {message}")]
    Record {
        index: usize,
        field: String,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn record(index: usize, field: impl Into<String>, message: impl ToString) -> Self {
        Error::Record {
            index,
            field: field.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
