use thiserror::Error;

/// Errors surfaced by model construction, inference, evaluation, and IO.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid decision problem: {0}")]
    InvalidDecisionProblem(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("csv error at row {row}, column `{column}`: {message}")]
    Csv {
        row: usize,
        column: String,
        message: String,
    },

    #[error("csv error: {0}")]
    CsvFormat(String),

    #[error("sampler error: {0}")]
    Sampler(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
