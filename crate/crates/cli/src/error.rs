use std::path::PathBuf;

use crate::descriptor::DescriptorError;

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const VIOLATION: u8 = 2;
    pub const IO: u8 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error(transparent)]
    Core(#[from] ptail_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use ptail_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Descriptor(_) => exit::USAGE,
            CliError::Core(E::InternalConsistency(_) | E::Divergence(_) | E::MomentDivergence) => exit::VIOLATION,
            CliError::Core(_) => exit::USAGE,
            CliError::Io { .. } => exit::IO,
        }
    }
}
