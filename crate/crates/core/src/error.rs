use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("`{op}` is undefined for zero input")]
    ZeroInput { op: &'static str },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension modulus is not monic/irreducible over F_p")]
    BadModulus,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("elements belong to different finite fields")]
    FieldMismatch,
    #[error("invalid Drinfeld module: {0}")]
    InvalidModule(String),
    #[error("the place at infinity is not allowed here")]
    InfinitePlace,
    #[error("bad reduction at {place}")]
    BadReduction { place: String },
    #[error("value is not integral at {place}")]
    NotIntegral { place: String },
    #[error("alpha must be 0 or a torsion point")]
    NontorsionAlpha,
    #[error("beta must be a certified nontorsion point")]
    TorsionBeta,
    #[error("{what} exceeds the configured guard ({limit})")]
    GuardExceeded { what: &'static str, limit: u64 },
    #[error("residue order and valuation conditions disagree at {place} for Q = {q_poly}")]
    CharacterizationMismatch { place: String, q_poly: String },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
