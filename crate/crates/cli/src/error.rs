use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field `{field}`: {message}")]
    Validation {
        field: String,
        /// Underlying error kind when the check mirrors a library error.
        kind: &'static str,
        message: String,
    },
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] nhqdyn::Error),
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("{failures} invariant check(s) failed")]
    AuditFailed { failures: usize },
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            kind: "ValidationError",
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::Validation { .. } => "ValidationError",
            CliError::Usage(_) => "UsageError",
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => "IoError",
            CliError::AuditFailed { .. } => "AuditFailed",
        }
    }

    /// 2 for anything wrong with the invocation or the input document,
    /// 1 for failures while computing or writing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Usage(_) => 2,
            CliError::Core(_) | CliError::Io { .. } | CliError::AuditFailed { .. } => 1,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut body = json!({ "kind": self.kind(), "message": self.to_string() });
        match self {
            CliError::Parse { path, line, column, .. } => {
                body["path"] = json!(path);
                body["line"] = json!(line);
                body["column"] = json!(column);
            }
            CliError::Validation { field, kind, .. } => {
                body["field"] = json!(field);
                body["cause"] = json!(kind);
            }
            _ => {}
        }
        json!({ "error": body })
    }
}

pub type CliResult<T> = Result<T, CliError>;
