use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error("cannot read config file {path}: {source}")]
    ConfigFile { path: String, source: std::io::Error },
    #[error("numerical failure: {0}")]
    Numerical(#[from] poppe::Error),
    #[error("breakdown:\n  {}", .0.join("\n  "))]
    Breakdown(Vec<String>),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::ConfigFile { .. } => 1,
            CliError::Numerical(_) | CliError::Breakdown(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}
