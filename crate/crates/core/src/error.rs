use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown state family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("missing required parameter `{0}`")]
    MissingParameter(String),
    #[error("state has no non-zero coefficients")]
    AllCoefficientsZero,
    #[error("numerical overflow: {0}")]
    Overflow(String),
    #[error("bias |b| = {0} must be < 1")]
    InvalidBias(f64),
    #[error("bias has already been subtracted from this grid")]
    BiasAlreadySubtracted,
    #[error("grid does not cover the full square: {0}")]
    IncompleteCoverage(String),
    #[error("inconsistent data at beta = ({re}, {im}): {detail}")]
    InconsistentData { re: f64, im: f64, detail: String },
    #[error("{0} is not supported here: {1}")]
    Unsupported(&'static str, &'static str),
    #[error("not enough data: need more than {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("singular normal matrix: {0}")]
    SingularMatrix(String),
    #[error("fit did not converge: {0}")]
    NonConvergence(String),
    #[error("Fock truncation captures only {captured} of the norm (tolerance {tol})")]
    TailViolation { captured: f64, tol: f64 },
    #[error("design matrix is ill-conditioned: condition number {cond:.3e} exceeds {threshold:.3e}")]
    IllConditioned { cond: f64, threshold: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.into(), reason: reason.into() }
    }
}
