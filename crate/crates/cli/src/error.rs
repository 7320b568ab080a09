use thiserror::Error;

pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_MISSING_DATA: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] powerspec::Error),

    #[error("{0}")]
    Invalid(String),

    #[error("invalid configuration:\n{}", .0.iter().map(|p| format!("  - {p}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<String>),

    #[error("{0}")]
    MissingData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// The reader of stdout went away (for example `| head`).
    pub fn is_broken_pipe(&self) -> bool {
        let mut cur: Option<&(dyn std::error::Error + 'static)> = match self {
            CliError::Io(e) | CliError::Core(powerspec::Error::Io(e)) => Some(e),
            other => Some(other),
        };
        while let Some(e) = cur {
            if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) {
                return true;
            }
            cur = e.source();
        }
        false
    }

    pub fn exit_code(&self) -> u8 {
        use powerspec::Error as E;
        match self {
            CliError::Invalid(_) | CliError::Config(_) => EXIT_INVALID,
            CliError::MissingData(_) => EXIT_MISSING_DATA,
            CliError::Io(_) => EXIT_INTERNAL,
            CliError::Core(e) => match e {
                E::NonConvergence { .. } | E::BracketFailure(_) | E::NotSymmetric { .. } | E::Io(_) => EXIT_INTERNAL,
                _ => EXIT_INVALID,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
