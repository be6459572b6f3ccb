use std::fmt;

/// Process exit status. The numeric values are part of the CLI contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    /// Certified, or the requested operation succeeded.
    Success = 0,
    InputError = 1,
    /// Iteration budget spent without a certificate; best profile written.
    BudgetExhausted = 2,
    /// `verify` found the profile is not an ε-NE.
    VerificationFailed = 3,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// Anything that stops a command before it produces a result. All of these
/// map to exit status 1.
#[derive(Debug)]
pub enum CliError {
    /// Malformed JSON; `offset` is a byte offset into the file.
    Parse { file: String, offset: usize, message: String },
    /// Well-formed JSON that does not match the schema.
    Schema { file: String, path: String, message: String },
    Io { file: String, source: std::io::Error },
    /// Rejected by the solver library: bad configuration or an invalid game.
    Core(teamsolve_core::Error),
    Usage(String),
}

impl CliError {
    pub fn schema(file: &str, path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema {
            file: file.to_string(),
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn status(&self) -> Status {
        Status::InputError
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { file, offset, message } => {
                write!(f, "{file}: JSON parse error at byte offset {offset}: {message}")
            }
            CliError::Schema { file, path, message } => {
                let path = if path.is_empty() { "." } else { path.as_str() };
                write!(f, "{file}: schema error at {path}: {message}")
            }
            CliError::Io { file, source } => write!(f, "{file}: {source}"),
            CliError::Core(e) => match e {
                teamsolve_core::Error::InvalidConfig(msg) => write!(f, "{msg}"),
                other => write!(f, "{other}"),
            },
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<teamsolve_core::Error> for CliError {
    fn from(e: teamsolve_core::Error) -> Self {
        CliError::Core(e)
    }
}
