use std::path::PathBuf;

/// Errors surfaced by the harness and CLI, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: contactnet_core::Error,
    },

    #[error("data error: {0}")]
    Data(String),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use contactnet_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config(_) => EXIT_USAGE,
            CliError::Io { .. } | CliError::Data(_) => EXIT_DATA,
            CliError::Core { source, .. } => match source {
                E::Numeric(_) => EXIT_NUMERIC,
                E::Domain(_) | E::Refused(_) => EXIT_USAGE,
                E::Parse { .. }
                | E::SelfLoop { .. }
                | E::InvalidGraph(_)
                | E::UndefinedStatistic(_)
                | E::Fit(_) => EXIT_DATA,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

/// Attach context to core errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for contactnet_core::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| CliError::Core { context: what(), source })
    }
}
