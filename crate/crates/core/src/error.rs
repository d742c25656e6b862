use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is even; only odd moduli are supported")]
    EvenModulus(String),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: String, m: String },

    #[error("quadratic coefficient {b} is not coprime to {r}")]
    BNotCoprime { b: i64, r: u64 },

    #[error("modulus {q} exceeds the table limit {limit}")]
    ModulusTooLarge { q: String, limit: u64 },

    #[error("character modulo {d} cannot be lifted to modulus {q}")]
    LiftMismatch { d: u64, q: u64 },

    #[error("character is not primitive modulo {0}")]
    NotPrimitive(u64),

    #[error("character must be primitive and even with conductor > 1")]
    NotPrimitiveEven,

    #[error("the principal character has no central value here")]
    PrincipalCharacter,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("Postnikov verification failed at x = {x} (q = {q}, d = {d})")]
    VerificationFailed { q: u64, d: u64, x: u64 },

    #[error("no closed form for S_{{q,d}}: {0}")]
    RegimeUnsupported(String),

    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("argument is a pole of the gamma factor")]
    PoleInput,

    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
