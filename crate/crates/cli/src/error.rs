use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] bolab_core::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for bad configs and inputs, 2 for numerical failures, 3 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Core(bolab_core::Error::Io(_)) | CliError::Io(_) => 3,
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Core(_) => 1,
        }
    }
}
