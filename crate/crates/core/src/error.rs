use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("power series leading coefficient {0} is not a unit")]
    NotInvertible(String),
    #[error("standard factorization needs a word of length at least 2")]
    WordTooShort,
    #[error("letter {0} is not in the alphabet")]
    AlphabetMismatch(String),
    #[error("index {0} is outside the supported caps")]
    Unsupported(String),
    #[error("element is not in an admissible sector: {0}")]
    Sector(String),
    #[error("truncation windows do not match ({0} vs {1})")]
    WindowMismatch(i64, i64),
    #[error("automorphism is not unipotent: {0}")]
    NotUnipotent(String),
    #[error("precision {got} is below the requested window {want}")]
    Precision { got: i64, want: i64 },
    #[error("symbol {0} has no realization in this context")]
    Unrealizable(String),
    #[error("relation {0} is not in the expected validation class")]
    Classification(String),
    #[error("recursion budget exceeded in {0}")]
    RecursionBudget(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
