use thiserror::Error;

use crate::document::Kind;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column} ({path}): {message}")]
    Parse {
        line: usize,
        column: usize,
        path: String,
        message: String,
    },
    #[error("unsupported document version `{0}`")]
    UnsupportedVersion(String),
    #[error("task {task}: unknown operation `{op}`")]
    UnknownOperation { task: usize, op: String },
    #[error("{context}: unresolved reference `{name}`")]
    UnresolvedReference { name: String, context: String },
    #[error("{context}: expected a {expected}, found a {found}")]
    KindMismatch {
        context: String,
        expected: Kind,
        found: Kind,
    },
    #[error("task {task}: `{op}` takes {expected} arguments, got {found}")]
    Arity {
        task: usize,
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("object `{object}`: missing field `{field}`")]
    MissingField { object: String, field: &'static str },
    #[error("object `{object}`: field `{field}` does not apply to a {kind}")]
    UnexpectedField {
        object: String,
        kind: Kind,
        field: &'static str,
    },
    #[error("object `{0}` is defined twice")]
    DuplicateName(String),
    #[error("format `{0}` is not available for this report")]
    FormatUnavailable(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
