use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("modulus {0} is not an odd prime below 2^31")]
    BadModulus(u64),
    #[error("inconsistent row lengths: expected {expected}, found {found}")]
    RowLength { expected: usize, found: usize },
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("subspace is not isotropic")]
    NotIsotropic,
    #[error("subspace is not maximal isotropic")]
    NotMaximalIsotropic,
    #[error("matrix does not preserve the split form")]
    NotOrthogonal,
    #[error("index {0} out of range")]
    OutOfRange(usize),
    #[error("invalid composition: {0}")]
    BadComposition(String),
    #[error("invalid invariants: {0}")]
    BadInvariants(String),
    #[error("inadmissible generator: {0}")]
    Inadmissible(String),
    #[error("hypotheses unmet: {0}")]
    Hypothesis(String),
    #[error("parameter outside domain: {0}")]
    Domain(String),
    #[error("budget exceeded: projected {projected} > budget {budget}")]
    Budget { projected: u128, budget: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
