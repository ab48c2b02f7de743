use princheb::density::DensityError;
use princheb::numberfield::FieldError;
use princheb::verifier::VerifierError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Field(FieldError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Field(e)
    }
}

impl From<VerifierError> for CliError {
    fn from(e: VerifierError) -> Self {
        match e {
            VerifierError::Field(f) => CliError::Field(f),
            other => CliError::Inconsistent(other.to_string()),
        }
    }
}

impl CliError {
    /// 2 for bad or refused input, 3 when a computation could not be completed
    /// or contradicts itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Field(
                FieldError::Undecided { .. } | FieldError::Undetermined(_) | FieldError::Internal(_),
            ) => 3,
            CliError::Field(_) => 2,
            CliError::Density(DensityError::Internal(_)) => 3,
            CliError::Density(_) => 2,
            CliError::Inconsistent(_) => 3,
        }
    }
}
