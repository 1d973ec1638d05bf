use thiserror::Error;

/// Errors raised by the algebra engine and its I/O layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("InvalidField: {0}")]
    InvalidField(String),
    #[error("InvalidRing: {0}")]
    InvalidRing(String),
    #[error("ParseError: {0}")]
    Parse(String),
    #[error("HomogeneityViolation: entry ({row},{col}) should be homogeneous of degree {expected}, found `{found}`")]
    HomogeneityViolation {
        row: usize,
        col: usize,
        expected: i64,
        found: String,
    },
    #[error("NonHomogeneous: {0}")]
    NonHomogeneous(String),
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    #[error("ComplexViolation: {0}")]
    ComplexViolation(String),
    #[error("RingShapeMismatch: {0}")]
    RingShapeMismatch(String),
    #[error("NotAChainMap: d(phi) is nonzero in cohomological degree {degree}")]
    NotAChainMap { degree: i64 },
    #[error("SquareNonzero: {0}")]
    SquareNonzero(String),
    #[error("FlagViolation: {0}")]
    FlagViolation(String),
    #[error("AnchorNotAComplex: {0}")]
    AnchorNotAComplex(String),
    #[error("ParityMissing: curved module carries no level data")]
    ParityMissing,
    #[error("FactorizationFailed: {0}")]
    FactorizationFailed(String),
    #[error("InvariantViolation: {0}")]
    InvariantViolation(String),
    #[error("HomotopyInvalid: {0}")]
    HomotopyInvalid(String),
    #[error("PreconditionViolation: {0}")]
    Precondition(String),
    #[error("BudgetExceeded: {needed} states needed, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("NotArtinian: {0}")]
    NotArtinian(String),
    #[error("NoWitnessDegree: {0}")]
    NoWitnessDegree(String),
    #[error("SupportUnbounded: {0}")]
    SupportUnbounded(String),
    #[error("NotMinimal: {0}")]
    NotMinimal(String),
    #[error("ValidationError({0})")]
    Validation(String),
    #[error("IoError: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
