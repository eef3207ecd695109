use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A user-supplied parameter is out of range. `field` names the offending input.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("ω = {omega} is outside the domain of {what} (|g| = {g_abs})")]
    Domain {
        what: &'static str,
        omega: f64,
        g_abs: f64,
    },

    #[error("gap ({omega_b}, {omega_t}) matches none of the three endpoint types")]
    GapClassification { omega_b: f64, omega_t: f64 },

    #[error("eigenfunction consistency check failed: |r + g_mu| = {mismatch:e}")]
    Consistency { mismatch: f64 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("factorization breakdown at pivot {pivot}")]
    SingularPivot { pivot: usize },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {worst_residual:e})")]
    NoConvergence {
        iterations: usize,
        worst_residual: f64,
    },

    #[error("periodic tying failed: {0}")]
    Tying(String),

    #[error("interpolation error: {0}")]
    Interpolation(String),

    /// A sweep could not identify the spectral feature it tracks.
    #[error("study failed: {0}")]
    Study(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input rather than numerical failure.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. } | Error::Geometry(_))
    }
}
