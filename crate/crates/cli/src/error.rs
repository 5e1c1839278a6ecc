use std::path::PathBuf;

use crate::config::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Core(#[from] capflow_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} certificate(s) failed or were inconclusive")]
    Certificates(usize),
    #[error("{0}")]
    Usage(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }

    /// 2: bad input, 3: a structural assumption fails, 4: blow-up.
    pub fn exit_code(&self) -> u8 {
        use capflow_core::Error as E;
        match self {
            Self::Parse(_) | Self::Usage(_) => 2,
            Self::Core(E::Config(_) | E::Domain(_) | E::Grid { .. }) => 2,
            Self::Core(E::Assumption { .. } | E::InvalidAnisotropy(_) | E::Incompatible { .. }) => 3,
            Self::Core(E::BlowUp { .. }) => 4,
            Self::Core(E::Inconclusive(_)) | Self::Io { .. } | Self::Certificates(_) | Self::Internal(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
