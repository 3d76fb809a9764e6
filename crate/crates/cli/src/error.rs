use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("ValidationError: {0}")]
    Validation(String),

    #[error("{kind}: {0}", kind = .0.kind())]
    Core(#[from] igk_core::Error),

    #[error("IoError: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Core(e) if e.is_contract_violation() => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) => 4,
        }
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub type CliResult<T> = Result<T, CliError>;
