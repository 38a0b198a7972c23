use thiserror::Error;

/// Errors raised by the library. Variants split into input validation
/// failures and internal invariant violations; the CLI maps the two kinds
/// to distinct exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("group closure exceeds {0} elements")]
    GroupTooLarge(usize),
    #[error("measure masses sum to {0}, not 1")]
    NonNormalizedMeasure(String),
    #[error("polynomial is not maximal at p = {0}")]
    NotPMaximal(u64),
    #[error("discriminant is zero")]
    ZeroDiscriminant,
    #[error("Euler factor mismatch at coefficient {0}")]
    EulerFactorMismatch(usize),
    #[error("zero input to Hilbert symbol")]
    ZeroInput,
    #[error("{0} has no square root in Q_{1}")]
    NoSquareRoot(String, u64),
    #[error("{0} is not a square modulo {1}, so p does not split")]
    NotSplit(i64, u64),
    #[error("prime {0} is beyond the splitting cache bound {1}")]
    CacheMiss(u64, u64),
    #[error("form is totally ramified at some prime")]
    TotallyRamifiedSomewhere,
    #[error("ramified input at p = {0}")]
    RamifiedInput(u64),
    #[error("class group tabulation does not cover d = {0}")]
    InsufficientTabulation(i64),
    #[error("no separating projection found for pair at p = {0}")]
    NoSeparatingProjection(u64),
    #[error("degenerate: discriminant vanishes mod {0}")]
    Degenerate(u64),
    #[error("scheme defined by the Pfaffians is not five reduced points")]
    DegenerateScheme,
    #[error("empty family")]
    EmptyFamily,
    #[error("prime cache bound {have} is below required {need}")]
    InsufficientPrimeCache { have: u64, need: u64 },
    #[error("no orthogonal three-square decomposition found within the search bound")]
    NotFound,
    #[error("embeddings disagree on the splitting of p = {0}")]
    EmbeddingDisagreement(u64),
    #[error("2-adic square class undecided at precision {0}")]
    Undecided2Adic(u32),
    #[error("unknown splitting symbol {0}")]
    UnknownSymbol(String),
    #[error("cache format version {found} does not match {expected}")]
    CacheVersion { found: String, expected: String },
    #[error("malformed cache: {0}")]
    MalformedCache(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for failures that indicate a bug or a mathematical invariant
    /// breaking, as opposed to bad user input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::EmbeddingDisagreement(_)
                | Error::Undecided2Adic(_)
                | Error::NoSeparatingProjection(_)
                | Error::EulerFactorMismatch(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::GroupTooLarge(_) => "GroupTooLarge",
            Error::NonNormalizedMeasure(_) => "NonNormalizedMeasure",
            Error::NotPMaximal(_) => "NotPMaximal",
            Error::ZeroDiscriminant => "ZeroDiscriminant",
            Error::EulerFactorMismatch(_) => "EulerFactorMismatch",
            Error::ZeroInput => "ZeroInput",
            Error::NoSquareRoot(..) => "NoSquareRoot",
            Error::NotSplit(..) => "NotSplit",
            Error::CacheMiss(..) => "CacheMiss",
            Error::TotallyRamifiedSomewhere => "TotallyRamifiedSomewhere",
            Error::RamifiedInput(_) => "RamifiedInput",
            Error::InsufficientTabulation(_) => "InsufficientTabulation",
            Error::NoSeparatingProjection(_) => "NoSeparatingProjection",
            Error::Degenerate(_) => "Degenerate",
            Error::DegenerateScheme => "DegenerateScheme",
            Error::EmptyFamily => "EmptyFamily",
            Error::InsufficientPrimeCache { .. } => "InsufficientPrimeCache",
            Error::NotFound => "NotFound",
            Error::EmbeddingDisagreement(_) => "EmbeddingDisagreement",
            Error::Undecided2Adic(_) => "Undecided2Adic",
            Error::UnknownSymbol(_) => "UnknownSymbol",
            Error::CacheVersion { .. } => "CacheVersion",
            Error::MalformedCache(_) => "MalformedCache",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
