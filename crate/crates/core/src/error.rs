use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("the Kronecker symbol (0/n) is not a quadratic character")]
    ZeroDiscriminant,

    #[error("{0} is not a discriminant (must be nonzero and congruent to 0 or 1 mod 4)")]
    NotDiscriminant(i64),

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("z = {0} is not a squarefree integer z > 1 with z = 1 (mod 4)")]
    NotInW(u64),

    #[error("({f}, {g}) is not a factorization of {z_star} into fundamental discriminants")]
    InvalidGenusPair { f: i64, g: i64, z_star: i64 },

    #[error("character is principal; its L-series has no certified value here")]
    PrincipalCharacter,

    #[error(
        "z = {z} has {h} classes but only {genera} genera; \
         the class group has complex characters and genus data cannot recover r(n, z)"
    )]
    NotOneClassPerGenus { z: u64, h: usize, genera: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A computed quantity broke an identity that must hold exactly.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("malformed table cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    /// True for errors that report a broken mathematical invariant rather
    /// than bad input.
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, Error::Invariant(_))
    }
}
