use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid value for `{key}`: {message}")]
    InvalidKey { key: String, message: String },

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("config file {path}, line {line}: {message}")]
    Syntax { path: String, line: usize, message: String },

    #[error(transparent)]
    Core(#[from] poisonlab_core::Error),

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn key(key: &str, message: impl Into<String>) -> Self {
        Self::InvalidKey { key: key.to_string(), message: message.into() }
    }
}
