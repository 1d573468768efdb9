use std::path::PathBuf;

pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_INCONSISTENCY: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: std::io::Error },
    Validation { line: usize, message: String },
    Core(sparsedisc::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => EXIT_IO,
            CliError::Validation { .. } => EXIT_VALIDATION,
            CliError::Core(e) if e.is_cap() => EXIT_CAP,
            CliError::Core(sparsedisc::Error::InternalInconsistency(_)) => EXIT_INCONSISTENCY,
            CliError::Core(_) => EXIT_VALIDATION,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Validation { line, message } => write!(f, "line {line}: {message}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<sparsedisc::Error> for CliError {
    fn from(e: sparsedisc::Error) -> Self {
        CliError::Core(e)
    }
}
