use thiserror::Error;

/// Errors raised by library operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("rank-deficient input: {0}")]
    RankDeficient(String),
    #[error("unknown lattice `{0}`")]
    UnknownLattice(String),
    #[error("degenerate form: {0}")]
    Degenerate(String),
    #[error("zero vector")]
    ZeroVector,
    #[error("vector is not primitive")]
    Imprimitive,
    #[error("vector is isotropic")]
    Isotropic,
    #[error("matrix does not preserve the form: {0}")]
    NotIsometry(String),
    #[error("isometry is not of cyclic type")]
    NotCyclicType,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration of {size} elements exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

impl Error {
    /// Whether the error reports a broken internal invariant rather than bad
    /// input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
