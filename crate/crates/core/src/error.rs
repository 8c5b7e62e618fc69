use thiserror::Error;

use crate::linop::SpectralResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("power method did not converge after {} iterations (residual {:.3e})", .best.iterations, .best.residual)]
    Convergence { best: Box<SpectralResult> },

    #[error("unsupported oracle: {0}")]
    Unsupported(String),

    #[error("line search failed at iteration {iteration}: {reason} (last M = {last_m:.3e})")]
    LineSearch {
        iteration: usize,
        reason: String,
        last_m: f64,
        last_trial: Vec<f64>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(context: &'static str, expected: usize, got: usize) -> Self {
        Error::Dimension {
            context,
            expected,
            got,
        }
    }
}
