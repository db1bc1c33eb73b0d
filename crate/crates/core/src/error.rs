use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("form [{0}, {1}, {2}] is not positive definite")]
    NotPositiveDefinite(i64, i64, i64),
    #[error("form [{0}, {1}, {2}] is degenerate")]
    Degenerate(i64, i64, i64),
    #[error("lattice is not positive definite")]
    IndefiniteLattice,
    #[error("gram matrix is not square and symmetric")]
    NotSymmetric,
    #[error("unsupported lattice rank {0} (expected 1..=5)")]
    UnsupportedRank(usize),
    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),
    #[error("{0} is not a prime")]
    NotPrime(i64),
    #[error("local test needs a quaternary lattice, got rank {0}")]
    NotQuaternary(usize),
    #[error("unknown rule table `{0}`")]
    UnknownTable(String),
    #[error("invalid rule table data: {0}")]
    TableData(String),
    #[error("bad form `{0}` (expected [a,b,c], <x,y> or a,b,c)")]
    FormSpec(String),
    #[error("bad lattice spec `{0}`")]
    LatticeSpec(String),
    #[error("no embedding found: {0}")]
    EmbeddingNotFound(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("certificate does not verify: {0}")]
    BadCertificate(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
