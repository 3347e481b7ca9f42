use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("numeric contract violated: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn io(path: &std::path::Path, e: std::io::Error) -> CliError {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn from_core(field: &str, e: qprospect_core::Error) -> CliError {
        if e.is_numeric_contract() {
            let message = e.to_string();
            let message = message.strip_prefix("numeric contract violated: ").unwrap_or(&message);
            CliError::Numeric(format!("{field}: {message}"))
        } else {
            CliError::Validation(format!("{field}: {e}"))
        }
    }

    pub fn context(self, outer: &str) -> CliError {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{outer}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("{outer}: {m}")),
            other => other,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 3,
            CliError::Validation(_) | CliError::Io(_) => 2,
        }
    }
}
