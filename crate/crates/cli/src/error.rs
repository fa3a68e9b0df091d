use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(ConfigError),
    #[error("{0}")]
    Core(#[from] spinfw::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl CliError {
    /// 1 for a failed computation, 2 for bad input, 3 for internal faults.
    pub fn exit_code(&self) -> u8 {
        use spinfw::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Config(_) | E::Domain(_) | E::Precondition(_) | E::Input(_) | E::SeriesTruncation(_)) => {
                2
            }
            CliError::Core(E::Integration { .. } | E::Diagnostic(_)) => 1,
            CliError::Core(E::Internal(_)) | CliError::Io(_) => 3,
        }
    }
}
