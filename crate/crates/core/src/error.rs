use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the configured limit {limit} (set PASSIVITY_MAX_DIM to raise it)")]
    SizeLimit { dim: usize, limit: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not hermitian: asymmetry {asym:.3e} exceeds tolerance {tol:.1e}")]
    NotHermitian { asym: f64, tol: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("not unitary: ||U^dag U - I|| = {0:.3e}")]
    NotUnitary(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid symmetry model: {0}")]
    InvalidModel(String),
    #[error("operator does not respect the symmetry: violation {0:.3e}")]
    Commutation(f64),
    #[error("block decomposition failed: {0}")]
    Decomposition(String),
    #[error("rank deficiency: {0}")]
    Rank(String),
    #[error("degenerate pair: {0}")]
    DegeneratePair(String),
    #[error("algebra violation: {0}")]
    Algebra(String),
    #[error("hamiltonian is trivial for this symmetry (residual {0:.3e}); every state is completely passive")]
    Triviality(f64),
    #[error("{0}")]
    WrongModelKind(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
