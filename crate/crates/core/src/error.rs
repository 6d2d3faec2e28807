use thiserror::Error;

/// Errors raised by matrix, function, measure and connection operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    NonHermitianInput { asymmetry: f64, tolerance: f64 },
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("function undefined at eigenvalue {at:e}")]
    DomainError { at: f64 },
    #[error("matrix is numerically singular: smallest eigenvalue {min_eigenvalue:e}")]
    SingularMatrix { min_eigenvalue: f64 },
    #[error("epsilon ladder did not stabilize: last step changed by {change:e}")]
    ConvergenceFailure { change: f64 },
    #[error("negative scalar {0} in a cone operation")]
    NegativeScalar(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate sample grid: {0}")]
    DegenerateGrid(String),
    #[error("integral is not finite")]
    NonFiniteIntegral,
    #[error("integrand lacks a declared value at {0}")]
    MissingEndpointValue(&'static str),
    #[error("measures are incomparable in the atoms-plus-density representation")]
    IncomparableRepresentation,
    #[error("no representing measure available for {0}")]
    UnsupportedInversion(String),
    #[error("result deviates from a multiple of the identity by {deviation:e}")]
    NonScalarResult { deviation: f64 },
    #[error("connection is numerically zero")]
    ZeroConnection,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
