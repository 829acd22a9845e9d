use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("inconsistent harmonic truncation: {0} vs {1}")]
    InconsistentHarmonics(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// `Re λ` at or below the lower bound `-k_c` where the memory integral diverges.
    #[error("Re(lambda) = {re} is outside the transfer domain (must exceed {floor})")]
    BoundViolation { re: f64, floor: f64 },

    #[error("quadrature did not converge (last change {last_change:e})")]
    QuadratureError { last_change: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular Newton jacobian")]
    SingularJacobian,

    #[error("no limit cycle found from any seed")]
    NoCycle,

    #[error("matched line: reflection coefficient vanishes, no discrete spectrum")]
    MatchedLine,

    #[error("reflection coefficient pole: (R + Ra) * Y0 = -1")]
    ReflectionPole,

    #[error("non-finite value in model evaluation")]
    NonFinite,
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// Short stable identifier, used as the per-row error code in sweep output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::InconsistentHarmonics(..) => "INCONSISTENT_HARMONICS",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::BoundViolation { .. } => "BOUND_VIOLATION",
            Error::QuadratureError { .. } => "QUADRATURE_ERROR",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::SingularJacobian => "SINGULAR_JACOBIAN",
            Error::NoCycle => "NO_CYCLE",
            Error::MatchedLine => "MATCHED_LINE",
            Error::ReflectionPole => "REFLECTION_POLE",
            Error::NonFinite => "NON_FINITE",
        }
    }
}
