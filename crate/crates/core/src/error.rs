use thiserror::Error;

use crate::linalg::LinalgError;
use crate::presentation::ParseError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("requested degree {requested} exceeds the declared truncation {declared}")]
    TruncationExceeded { requested: usize, declared: usize },
    #[error("the algebra does not vanish by degree {0}; declare `truncate D`")]
    MissingTruncation(usize),
    #[error("internal degree {needed} is needed but the algebra is only known through degree {available}")]
    InsufficientTruncation { needed: i64, available: i64 },
    #[error("relation column {0} is not homogeneous")]
    InhomogeneousRelation(usize),
    #[error("module presentation does not satisfy the algebra relations: {0}")]
    NotAModule(String),
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("lifting failed at stage {0}")]
    LiftingFailed(usize),
    #[error("classes are not composable: {0}")]
    NotComposable(String),
    #[error("module is not linear: {0}")]
    NotLinear(String),
    #[error("map entries do not lie in degree zero")]
    EntriesNotInR0,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("verification failed in degree {degree}: {message}")]
    VerificationFailed { degree: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
