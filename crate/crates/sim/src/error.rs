use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid value for `{key}`: {message}")]
    InvalidValue { key: String, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error(
        "{policy} with U={num_volte} needs {vars} binary variables, above the {which} cap of {cap} \
         (raise `{key}` to allow it)"
    )]
    SizeCap {
        policy: &'static str,
        num_volte: usize,
        vars: usize,
        cap: usize,
        which: &'static str,
        key: &'static str,
    },
    #[error("unknown plot family `{0}` (expected throughput, outage, fairness or infeasibility)")]
    UnknownFamily(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed results CSV: {0}")]
    Results(String),
    #[error(transparent)]
    Core(#[from] volte_core::Error),
}

impl SimError {
    /// Process exit status: 2 for configuration problems, 3 for size-cap
    /// refusals, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config { .. } | SimError::InvalidValue { .. } | SimError::UnknownKey(_) => 2,
            SimError::UnknownFamily(_) => 2,
            SimError::SizeCap { .. } => 3,
            _ => 1,
        }
    }

    pub fn invalid(key: &str, message: impl Into<String>) -> Self {
        SimError::InvalidValue {
            key: key.to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }
}
