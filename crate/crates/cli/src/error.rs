use std::fmt;

/// Failure of a CLI run, grouped by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration or arguments (exit code 2).
    Config(Vec<String>),
    /// Numerical failure such as non-convergence or a coverage problem
    /// (exit code 3).
    Numerical(String),
    /// Reading or writing files (exit code 4).
    Io(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(vec![msg.into()])
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msgs) => {
                write!(f, "invalid configuration:")?;
                for m in msgs {
                    write!(f, "\n  {m}")?;
                }
                Ok(())
            }
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tmode_core::Error> for CliError {
    fn from(e: tmode_core::Error) -> Self {
        use tmode_core::Error as E;
        match e {
            E::InvalidArgument(_)
            | E::UnsupportedOrder { .. }
            | E::UnsupportedDimension(_)
            | E::UnsupportedFormat(_)
            | E::NonUnitMode { .. }
            | E::DimensionMismatch { .. } => CliError::config(e.to_string()),
            E::Coverage { .. } | E::BasisMismatch { .. } | E::IllPosed { .. } | E::IncompatibleGrid(_) => {
                CliError::Numerical(e.to_string())
            }
            E::Serialization(_) => CliError::Io(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
