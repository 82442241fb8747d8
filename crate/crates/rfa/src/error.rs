//! Crate-wide error type and result alias.
//!
//! Errors carry enough context to be printed directly by the CLI. Each
//! variant maps to a process exit code: invalid parameters are usage errors
//! (1), anything wrong with input data or file content is a data error (2),
//! and non-finite values produced by numeric code are numeric errors (3).

use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter value outside its documented domain (bad generator
    /// sizes, out-of-range filter constants, unknown preset names, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data violates a precondition: empty graphs, isolated nodes
    /// where degree correction is required, mismatched node ids, ...
    #[error("{0}")]
    Data(String),

    /// Failed filesystem operation, tagged with the offending path.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed file content, tagged with path and 1-based line number.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// Numeric computation produced non-finite values.
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    /// Wrap an `io::Error` with the path it occurred on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Build a parse error for `path` at 1-based `line`.
    pub fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    /// Process exit code for the CLI: 1 usage, 2 data/parse, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) => 1,
            Error::Data(_) | Error::Io { .. } | Error::Parse { .. } => 2,
            Error::Numeric(_) => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_match_error_classes() {
        assert_eq!(Error::InvalidParameter("x".into()).exit_code(), 1);
        assert_eq!(Error::Data("x".into()).exit_code(), 2);
        assert_eq!(
            Error::io("f", std::io::Error::new(std::io::ErrorKind::NotFound, "gone")).exit_code(),
            2
        );
        assert_eq!(Error::parse("f", 3, "bad token").exit_code(), 2);
        assert_eq!(Error::Numeric("NaN".into()).exit_code(), 3);
    }

    #[test]
    fn parse_error_message_names_path_and_line() {
        let msg = Error::parse("edges.txt", 7, "expected two integers").to_string();
        assert!(msg.contains("edges.txt"));
        assert!(msg.contains(":7:"));
        assert!(msg.contains("expected two integers"));
    }
}
