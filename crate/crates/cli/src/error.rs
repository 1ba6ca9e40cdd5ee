use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration violates a parameter range or predicate.
    #[error("config error: {0}")]
    Config(String),

    /// The requested grid does not fit the declared memory budget.
    #[error("resource error: {0}")]
    Resource(String),

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error(transparent)]
    Core(#[from] illposed_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Manifest(_) | CliError::Io(_) => 4,
            CliError::Core(_) => 5,
        }
    }
}
