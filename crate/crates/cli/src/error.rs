use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Numerical(#[from] bi_waves::error::Error),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::Output { .. } => "OutputError",
            CliError::Numerical(e) => e.name(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}
