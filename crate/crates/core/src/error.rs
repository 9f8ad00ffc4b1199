use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A validation failure attached to one annotation record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub record: String,
    pub message: String,
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "record {}: {}", self.record, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid UTF-8 input: {0}")]
    Encoding(#[from] std::str::Utf8Error),

    #[error("duplicate document id `{0}`")]
    DuplicateDocument(String),

    #[error("unknown document id `{0}`")]
    UnknownDocument(String),

    #[error("degenerate counts; supply an explicit discount")]
    DegenerateCounts,

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty sequence")]
    EmptySequence,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "stream must be scanned in order (lemma `{lemma}` at {position}, last seen at {last})"
    )]
    OutOfOrder {
        lemma: String,
        position: usize,
        last: usize,
    },

    #[error("annotation is not aligned with document `{doc}`: {message}")]
    Misaligned { doc: String, message: String },

    #[error("clause too short to score: {0}")]
    ClauseTooShort(String),

    #[error("degenerate table")]
    DegenerateTable,

    #[error("{} invalid record(s):\n{}", .0.len(), join_records(.0))]
    Validation(Vec<RecordError>),

    #[error("malformed annotation JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn join_records(errors: &[RecordError]) -> String {
    errors
        .iter()
        .map(|e| format!("  {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}
