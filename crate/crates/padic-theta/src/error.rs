use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("element is not a unit")]
    NonUnit,
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("precision loss: {0}")]
    PrecisionLoss(String),
    #[error("incompatible series shapes: {0}")]
    CapMismatch(String),
    #[error("truncation cap overflow: {0}")]
    CapOverflow(String),
    #[error("weight outside the convergence disc: {0}")]
    WeightOutOfRadius(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("ideal is not coprime to the modulus")]
    NotCoprime,
    #[error("modulus too large: {0}")]
    ModulusTooLarge(String),
    #[error("characters are not self-dual: {0}")]
    NotSelfDual(String),
    #[error("q-expansion cap exhausted: {0}")]
    CapExhausted(String),
    #[error("ordinary projection did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("rank deficient: {0}")]
    RankDeficient(String),
    #[error("eigenvalues do not separate the target: {0}")]
    EigenAmbiguous(String),
    #[error("eigenvalue mismatch at l={ell}: expected {expected}, found {found}")]
    EigenMismatch {
        ell: u64,
        expected: String,
        found: String,
    },
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("local factor case mismatch: {0}")]
    CaseMismatch(String),
    #[error("character is not primitive: {0}")]
    NotPrimitive(String),
    #[error("inconsistency found: {0}")]
    InconsistencyFound(String),
    #[error("curve does not have multiplicative reduction: {0}")]
    NotMultiplicative(String),
    #[error("Frobenius image missing")]
    MissingFrobenius,
    #[error("validation failed [{clause}]: {detail}")]
    ValidationFailed { clause: String, detail: String },
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(clause: &str, detail: impl Into<String>) -> Error {
        Error::ValidationFailed {
            clause: clause.to_string(),
            detail: detail.into(),
        }
    }

    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Error {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 validation, 3 parse, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ValidationFailed { .. }
            | Error::NotSelfDual(_)
            | Error::Unsupported(_)
            | Error::NotCoprime
            | Error::ModulusTooLarge(_)
            | Error::NotPrimitive(_)
            | Error::CaseMismatch(_)
            | Error::NotMultiplicative(_)
            | Error::MissingFrobenius
            | Error::EigenMismatch { .. }
            | Error::EigenAmbiguous(_)
            | Error::DomainError(_) => 2,
            Error::Parse { .. } | Error::Io(_) => 3,
            _ => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
