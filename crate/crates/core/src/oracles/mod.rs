//! Sharp-operators, dual components and the proximal catalog.

pub mod dual;
pub mod prox;
pub mod sharp;

pub use dual::{dual_eval, eval_g, grad_g, DualEval};
pub use prox::{dist_to_k, eval_h, project_k, project_l1_ball, project_simplex, prox_h};
pub use sharp::{sharp, SharpResult};

use crate::linop::{default_max_iter, DEFAULT_SPECTRAL_TOL};

/// Settings of the spectral subroutines behind the matrix oracles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralOptions {
    pub tol: f64,
    /// `None` uses [`default_max_iter`] of the operator dimension.
    pub max_iter: Option<usize>,
    pub seed: u64,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_SPECTRAL_TOL,
            max_iter: None,
            seed: 0,
        }
    }
}

impl SpectralOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub(crate) fn budget(&self, d: usize) -> usize {
        self.max_iter.unwrap_or_else(|| default_max_iter(d))
    }
}
