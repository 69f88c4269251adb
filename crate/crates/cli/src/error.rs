use std::path::PathBuf;

use thiserror::Error;

/// Process exit status for each failure class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const BUDGET: i32 = 4;
    pub const DEGENERATE: i32 = 5;
    pub const INTERNAL: i32 = 6;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {message}")]
    Parse { context: String, message: String },
    #[error("{context}: {source}")]
    Model {
        context: String,
        #[source]
        source: behmm_core::Error,
    },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub(crate) fn parse(context: impl Into<String>, message: impl ToString) -> Self {
        CliError::Parse {
            context: context.into(),
            message: message.to_string(),
        }
    }

    pub(crate) fn model(context: impl Into<String>, source: behmm_core::Error) -> Self {
        CliError::Model {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        use behmm_core::Error as E;
        match self {
            CliError::Io { .. } | CliError::Parse { .. } => exit::PARSE,
            CliError::Model { source, .. } => match source {
                E::BudgetExceeded { .. } => exit::BUDGET,
                E::UndefinedRecurrence { .. } | E::DegenerateTrace { .. } => exit::DEGENERATE,
                _ => exit::VALIDATION,
            },
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
