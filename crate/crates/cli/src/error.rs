use thiserror::Error;

/// Errors that abort a command with exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{record}: {message}")]
    Record { record: String, message: String },

    #[error("algebroid fails validation: {0}")]
    Validation(String),

    #[error("unknown {kind} {name:?}; available: [{available}]")]
    Unknown {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] froelicher::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}
