use hexwatt::engine::EngineError;
use hexwatt::metrics::MetricsError;
use hexwatt::ConfigError;
use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;
pub const EXIT_INCOMPLETE: u8 = 4;
pub const EXIT_MISSING_FILE: u8 = 5;
pub const EXIT_CHECKSUM: u8 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    #[error("missing file: {0}")]
    MissingFile(String),
    #[error("sweep incomplete: {missing} of {total} runs missing or failed")]
    Incomplete { missing: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(ConfigError::Missing { .. } | ConfigError::MissingTable(_)) => EXIT_MISSING_FILE,
            CliError::Config(ConfigError::Checksum(_)) => EXIT_CHECKSUM,
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
            CliError::MissingFile(_) => EXIT_MISSING_FILE,
            CliError::Incomplete { .. } => EXIT_INCOMPLETE,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
