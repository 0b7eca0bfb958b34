use thiserror::Error;

/// Errors raised by the jet engine.
///
/// Every variant maps to a stable, machine-readable code (see [`Error::code`])
/// that the command-line frontend prints verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("requested level {requested} exceeds cutoff {cutoff}")]
    Level { requested: u32, cutoff: u32 },

    #[error("not a diffeomorphism: {0}")]
    NotDiffeomorphism(String),

    #[error("not unipotent: {0}")]
    NotUnipotent(String),

    #[error("not nilpotent: {0}")]
    NotNilpotent(String),

    #[error("matrix is not the pullback matrix of a jet: {0}")]
    NotAJet(String),

    #[error("parse error at offset {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("invalid eigenvalue data: {0}")]
    InvalidSpec(String),

    #[error("eigenvalue data does not match the jet: {0}")]
    SpecMismatch(String),

    #[error("declared splitting does not commute: {0}")]
    InvalidSplitting(String),

    #[error("subgroup Lie algebra is not contained in the ambient one")]
    Containment,

    #[error("generators are only valid up to degree {available}, level {needed} requested")]
    Validity { needed: u32, available: u32 },
}

impl Error {
    /// Stable error code used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DIM_MISMATCH",
            Error::Level { .. } => "LEVEL",
            Error::NotDiffeomorphism(_) => "NOT_DIFFEO",
            Error::NotUnipotent(_) => "NOT_UNIPOTENT",
            Error::NotNilpotent(_) => "NOT_NILPOTENT",
            Error::NotAJet(_) => "NOT_A_JET",
            Error::Parse { .. } => "PARSE",
            Error::InvalidSpec(_) => "INVALID_SPEC",
            Error::SpecMismatch(_) => "SPEC_MISMATCH",
            Error::InvalidSplitting(_) => "INVALID_SPLIT",
            Error::Containment => "CONTAINMENT",
            Error::Validity { .. } => "VALIDITY",
        }
    }

    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
