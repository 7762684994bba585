use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("entry ({row}, {col}) is not an integer")]
    NonInteger { row: usize, col: usize },

    #[error("entry ({row}, {col}) is not integral at {ell}")]
    NotEllIntegral { row: usize, col: usize, ell: u64 },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is singular")]
    Singular,

    #[error("valuation of zero is undefined")]
    ZeroValuation,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("localization primes differ: {0} vs {1}")]
    PrimeMismatch(u64, u64),

    #[error("form is degenerate")]
    Degenerate,

    #[error("pairing is not {ell}-integral on the lattice")]
    PairingNotIntegral { ell: u64 },

    #[error("lattice is not contained in the outer lattice at {ell}")]
    NotContained { ell: u64 },

    #[error("enumeration too large: {what} needs {count} candidates, bound is {bound}")]
    TooLarge {
        what: String,
        count: u128,
        bound: u64,
    },

    #[error("generator {generator} does not preserve the lattice")]
    NotStable { generator: usize },

    #[error("generator {generator} does not preserve the form")]
    NotInvariant { generator: usize },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("composition factor not isomorphic to the reference module: {0}")]
    NotIsomorphic(String),

    #[error("property violated: {0}")]
    Violation(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot read {path}: {source}")]
    Unreadable {
        path: String,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
