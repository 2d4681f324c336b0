use softiga_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Output(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParameter { .. }
            | CoreError::OutOfDomain { .. }
            | CoreError::IndexOutOfRange { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::NonUniformMesh
            | CoreError::InsufficientData { .. }
            | CoreError::Unsupported(_) => CliError::Config(e.to_string()),
            CoreError::NotPositiveDefinite { .. }
            | CoreError::NoConvergence { .. }
            | CoreError::RankDeficient { .. }
            | CoreError::Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}
