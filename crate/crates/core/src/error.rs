use thiserror::Error;

/// Every failure the library can report.
///
/// Variants fall into three groups that the CLI maps onto exit codes:
/// resource limits (`BudgetExceeded`), internal-consistency failures
/// (everything that "must not happen" for a supported family) and usage
/// errors (bad input).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("no exact Laurent quotient exists")]
    NotDivisible,
    #[error("expansion at v = infinity has a nonzero coefficient at exponent {0}")]
    PositiveDegree(i32),
    #[error("budget exceeded for {what}: needs {needed}, cap is {cap}")]
    BudgetExceeded { what: &'static str, needed: u128, cap: u128 },
    #[error("Hom fingerprint {0:?} matches more than one catalog class")]
    AmbiguousFingerprint(Vec<usize>),
    #[error("family does not support {0}")]
    UnsupportedFamily(String),
    #[error("interpolation of {0} did not stabilise within the prime ladder")]
    InterpolationUnstable(String),
    #[error("dim End of {0} varies with the prime")]
    NonGenericEnd(String),
    #[error("diagonal entry r[{0}][{0}] is not 1")]
    BadDiagonal(usize),
    #[error("involution condition fails at pair ({lower}, {upper})")]
    BadInvolution { lower: usize, upper: usize },
    #[error("recursion term for ({lower}, {upper}) has a nonzero constant term")]
    ConstantObstruction { lower: usize, upper: usize },
    #[error("quiver is not of Dynkin type: {0}")]
    NotDynkin(String),
    #[error("Hom relation on indecomposables has a cycle")]
    CycleDetected,
    #[error("no verified monomial found for {0}")]
    MonomialSearchFailed(String),
    #[error("determinant entries do not commute")]
    NonCommutingEntries,
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("invalid input: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 2,
            Error::Usage(_) | Error::UnsupportedFamily(_) | Error::NotDynkin(_) => 4,
            Error::Io(_) => 2,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
