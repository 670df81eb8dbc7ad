use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty word")]
    EmptyWord,
    #[error("letter {0:?} is outside rank {1}")]
    LetterOutOfRank(char, usize),
    #[error("cannot parse {0:?} as a word")]
    ParseWord(String),
    #[error("rank mismatch: expected at most {expected}, found generator index {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("rank must be at least 2 for this operation")]
    RankTooSmall,
    #[error("rank must be at most 26")]
    RankTooLarge,
    #[error("occurrence query supports at most 32 wraps: |v| = {got} exceeds {max}")]
    WrapCapExceeded { got: usize, max: usize },
    #[error("invalid characteristic pair: {0}")]
    InvalidCharPair(String),
    #[error("invalid relabeling: {0}")]
    InvalidRelabeling(String),
    #[error("supplied images and inverse images do not invert each other")]
    BadInverse,
    #[error("automorphism carries no inverse data")]
    MissingInverse,
    #[error("cannot parse automorphism literal: {0}")]
    ParseAutomorphism(String),
    #[error("size cap exceeded: need {needed}, cap is {cap}")]
    SizeCapExceeded { needed: u64, cap: u64 },
    #[error("normalization requires a positive length")]
    ZeroLength,
    #[error("radius must be at least 2")]
    RadiusTooSmall,
    #[error("automorphism is simple: no length-reducing Whitehead automorphism exists")]
    SimpleAutomorphism,
    #[error("factorization did not terminate within {0} steps")]
    MaxStepsExceeded(usize),
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
