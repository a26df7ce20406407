use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(mirage::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    /// Self-checks ran but some failed.
    #[error("{0}")]
    Validation(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    exit_code: i32,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: ErrorBody<'a>,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    /// Library errors split by cause: bad input is a config error.
    pub fn from_library(e: mirage::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Config(e.to_string())
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) | CliError::Validation(_) => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let kind = match self {
            CliError::Config(_) => "config",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
            CliError::Validation(_) => "validation",
        };
        let report = ErrorReport { error: ErrorBody { kind, message: self.to_string(), exit_code: self.exit_code() } };
        serde_json::to_string(&report).expect("error report serializes")
    }
}

impl From<mirage::Error> for CliError {
    fn from(e: mirage::Error) -> Self {
        CliError::from_library(e)
    }
}
