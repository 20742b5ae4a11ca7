use thiserror::Error;

/// Errors produced by the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("size mismatch: expected {expected} bits, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("{what} exceeds the cap of {cap}")]
    TooLarge { what: String, cap: usize },

    #[error("level {level} is never reached by the curve")]
    LevelNotFound { level: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("function is not increasing: f({lower:#b}) = 1 but f({upper:#b}) = 0")]
    NotIncreasing { lower: u64, upper: u64 },

    #[error("symmetry violated: f({omega:#b}) != f(sigma({omega:#b})) for generator {generator}")]
    NotSymmetric { omega: u64, generator: usize },

    #[error("group action is not transitive: index {missing} is outside the orbit of index 0")]
    NotTransitive { missing: usize },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
