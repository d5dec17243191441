use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("determinant must be positive, got {0}")]
    DeterminantSign(String),
    #[error("matrix has a zero denominator")]
    ZeroDenominator,
    #[error("element is not in SL2(Z) (level {0})")]
    NotInGamma(String),
    #[error("the identity fixes every point; no unique fixpoint")]
    AmbiguousFixpoint,
    #[error("precision too low: {0}")]
    PrecisionTooLow(String),
    #[error("j = {0} is excluded (degenerate curve formula)")]
    ExcludedJ(String),
    #[error("singular curve: g2^3 - 27 g3^2 = 0")]
    SingularCurve,
    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(String),
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error("target level {target} does not divide source level {source_level}")]
    NotADivisor { target: u64, source_level: u64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("division by a ball containing zero")]
    DivisionByZero,
    #[error("indeterminate numeric comparison: {0}")]
    Indeterminate(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
