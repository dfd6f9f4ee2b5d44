use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] bellhide_core::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use bellhide_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(E::Input(_) | E::Parse(_)) => 2,
            CliError::Core(E::Resource { .. }) => 3,
            CliError::Core(E::Internal(_)) => 4,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => 5,
            CliError::Check(_) => 6,
        }
    }
}
