use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("element {0} is not in the field")]
    NotInField(u32),
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials")]
    ZeroGcd,
    #[error("polynomial must be monic and non-constant")]
    NotMonicNonConstant,
    #[error("modulus must be a non-zero polynomial")]
    ZeroModulus,
    #[error("matrix is not invertible over the ring")]
    NonInvertible,
    #[error("parameter must be a unit of the constant field")]
    NonUnit,
    #[error("ambient mismatch: {0}")]
    Mismatch(String),
    #[error("{what} exceeds cap {limit}")]
    CapExceeded { what: String, limit: u64 },
    #[error("validation rule `{rule}` violated: {detail}")]
    Validation { rule: &'static str, detail: String },
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unknown fact key `{0}`")]
    UnknownFact(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency violation: {0}")]
    Inconsistent(String),
}

impl Error {
    pub fn cap(what: impl Into<String>, limit: u64) -> Self {
        Error::CapExceeded {
            what: what.into(),
            limit,
        }
    }

    pub fn validation(rule: &'static str, detail: impl Into<String>) -> Self {
        Error::Validation {
            rule,
            detail: detail.into(),
        }
    }

    /// True for resource-limit failures (as opposed to domain errors).
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
