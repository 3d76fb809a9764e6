use igk_dsl::DslError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample space mismatch in {0}")]
    SpaceMismatch(&'static str),

    #[error("invalid sample space: {0}")]
    InvalidSpace(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid Markov kernel: {0}")]
    InvalidKernel(String),

    #[error("domination violated at atom {atom}: mass {mass} on a null atom of the dominating measure")]
    Domination { atom: usize, mass: f64 },

    #[error("measure has zero total mass")]
    ZeroMass,

    #[error("exponent {exponent} out of range: {reason}")]
    Exponent { exponent: f64, reason: String },

    #[error("target atom {0} has an empty preimage")]
    EmptyFiber(usize),

    #[error("parameter {xi:?} outside the model domain: {reason}")]
    ParameterDomain { xi: Vec<f64>, reason: String },

    #[error("negative density {value} at atom {atom} for parameter {xi:?}")]
    NegativeDensity { atom: usize, xi: Vec<f64>, value: f64 },

    #[error("statistical model has total mass {total} at {xi:?}")]
    NotStatistical { xi: Vec<f64>, total: f64 },

    #[error("density expression: {0}")]
    Dsl(#[from] DslError),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Violations of a mathematical contract (as opposed to malformed input).
    pub fn is_contract_violation(&self) -> bool {
        matches!(
            self,
            Error::Domination { .. }
                | Error::ZeroMass
                | Error::Exponent { .. }
                | Error::EmptyFiber(_)
                | Error::NegativeDensity { .. }
                | Error::NotStatistical { .. }
                | Error::Dsl(DslError::Domain { .. })
        )
    }

    /// Short name of the error kind, used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SpaceMismatch(_) => "SpaceMismatchError",
            Error::InvalidSpace(_) => "InvalidSpaceError",
            Error::InvalidMeasure(_) => "InvalidMeasureError",
            Error::InvalidKernel(_) => "InvalidKernelError",
            Error::Domination { .. } => "DominationError",
            Error::ZeroMass => "ZeroMassError",
            Error::Exponent { .. } => "ExponentError",
            Error::EmptyFiber(_) => "EmptyFiberError",
            Error::ParameterDomain { .. } => "DomainError",
            Error::NegativeDensity { .. } => "NegativeDensityError",
            Error::NotStatistical { .. } => "NotStatisticalError",
            Error::Dsl(DslError::Syntax { .. }) => "SyntaxError",
            Error::Dsl(DslError::UnknownIdentifier { .. }) => "UnknownIdentifierError",
            Error::Dsl(DslError::Domain { .. }) => "DslDomainError",
            Error::Dsl(DslError::Arity { .. }) => "ArityError",
            Error::Dsl(DslError::Unsupported { .. }) => "UnsupportedError",
            Error::InvalidInput(_) => "ValidationError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
