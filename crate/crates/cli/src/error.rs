use serde::Serialize;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILURE: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
    pub const DEGENERACY: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse config: {0}")]
    ConfigParse(String),

    #[error("invalid config: {0}")]
    ConfigInvalid(String),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot serialize report: {0}")]
    Serialize(String),

    #[error(transparent)]
    Numerics(#[from] clarklab::Error),
}

/// Machine-readable form of a failed run, printed as one JSON line.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: String,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerics(e) if e.is_numerical_degeneracy() => exit::DEGENERACY,
            // invalid matrices, measures and parameters are input problems
            CliError::Numerics(_) | CliError::ConfigParse(_) | CliError::ConfigInvalid(_) => exit::CONFIG_ERROR,
            CliError::Io { .. } | CliError::Serialize(_) => exit::CONFIG_ERROR,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::ConfigParse(_) => "ConfigParse",
            CliError::ConfigInvalid(_) => "ConfigInvalid",
            CliError::Io { .. } => "IoFailure",
            CliError::Serialize(_) => "Serialize",
            CliError::Numerics(e) => e.kind(),
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord { error: self.kind().to_string(), message: self.to_string(), exit_code: self.exit_code() }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
