use thiserror::Error;

/// Failure to read a Coxeter matrix, word, index set or automorphism file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: malformed token `{token}`")]
    Token { line: usize, token: String },
    #[error("rank {0} exceeds the supported maximum of 32")]
    RankTooLarge(usize),
    #[error("missing matrix row {row}")]
    MissingRow { row: usize },
    #[error("row {row}: expected {expected} entries, found {found}")]
    RowLength { row: usize, expected: usize, found: usize },
    #[error("line {line}: unexpected trailing input")]
    TrailingInput { line: usize },
    #[error("asymmetric entry at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("diagonal entry ({index}, {index}) must be 1")]
    Diagonal { index: usize },
    #[error("off-diagonal entry ({i}, {j}) = {value} must be at least 2")]
    OffDiagonal { i: usize, j: usize, value: u32 },
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Other(String),
}

/// Failure of the word engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("step budget of {budget} exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("generator index {letter} out of range for rank {rank}")]
    InvalidLetter { letter: usize, rank: usize },
    #[error("word is not reduced")]
    NotReduced,
}
