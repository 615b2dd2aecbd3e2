use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, configuration or input files.
    #[error("{0}")]
    Usage(String),
    /// A computation failed.
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Numeric(_) => ExitCode::from(3),
        }
    }
}

impl From<spinpair::Error> for CliError {
    fn from(e: spinpair::Error) -> Self {
        use spinpair::Error as E;
        match e {
            E::InvalidInput(_) | E::DimensionMismatch { .. } | E::Parse { .. } | E::Io(_) => {
                CliError::Usage(e.to_string())
            }
            E::Numeric(_) | E::NoConvergence(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
