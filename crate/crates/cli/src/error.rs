use mubforge_core::error::{
    DimensionError, GramError, LandscapeError, PhaseError, PolishError, RecordError, SymmetryError, WhError,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    BadInput(String),
    /// A well-formed question answered in the negative.
    #[error("{0}")]
    Negative(String),
    #[error("numerical guard: {0}")]
    Guard(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BadInput(_) | CliError::Io(_) => 2,
            CliError::Negative(_) => 3,
            CliError::Guard(_) => 4,
        }
    }
}

impl From<RecordError> for CliError {
    fn from(e: RecordError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl From<DimensionError> for CliError {
    fn from(e: DimensionError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl From<PhaseError> for CliError {
    fn from(e: PhaseError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl From<GramError> for CliError {
    fn from(e: GramError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl From<WhError> for CliError {
    fn from(e: WhError) -> Self {
        CliError::BadInput(e.to_string())
    }
}

impl From<PolishError> for CliError {
    fn from(e: PolishError) -> Self {
        CliError::Guard(e.to_string())
    }
}

impl From<SymmetryError> for CliError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::UnstableRounding { .. } | SymmetryError::VerificationFailed => {
                CliError::Guard(e.to_string())
            }
            _ => CliError::BadInput(e.to_string()),
        }
    }
}

impl From<LandscapeError> for CliError {
    fn from(e: LandscapeError) -> Self {
        match e {
            LandscapeError::NotStationary { .. } => CliError::Guard(e.to_string()),
            _ => CliError::BadInput(e.to_string()),
        }
    }
}
