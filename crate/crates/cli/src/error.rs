use std::path::{Path, PathBuf};

use twophoton_core::Error as CoreError;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {field}: {message}")]
    Config { field: String, message: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: CoreError,
    },
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 for bad input, 2 when a solver or reconstruction step failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Parse(_) | CliError::Io { .. } => 1,
            CliError::Core { source, .. } => {
                if is_solver_failure(source) {
                    2
                } else {
                    1
                }
            }
        }
    }
}

fn is_solver_failure(e: &CoreError) -> bool {
    match e {
        CoreError::LinearSolver { .. }
        | CoreError::Newton { .. }
        | CoreError::BelowPositivityFloor { .. }
        | CoreError::IllConditionedTrace { .. }
        | CoreError::NoWellConditionedNode => true,
        CoreError::Source { source, .. } => is_solver_failure(source),
        _ => false,
    }
}

/// Attaches a context string to core errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T> Context<T> for twophoton_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|source| CliError::Core { context: what(), source })
    }
}
