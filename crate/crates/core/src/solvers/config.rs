use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linop::Vector;
use crate::oracles::SpectralOptions;

/// How the smoothness estimate `M_k` of each iteration is found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepMode {
    /// Doubling line-search on the quadratic surrogate condition.
    Backtracking,
    /// Closed-form step for least-squares problems; never re-evaluates `g`
    /// to accept a step.
    AnalyticQuadratic,
    /// Line-search started at a known `M̄_ε` and never decreased.
    FixedMBar,
}

/// How the primal averaging weight `γ_k` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    Theoretical,
    /// Exact segment minimization of the objective.
    GreedyObjective,
    /// Exact segment minimization of the squared feasibility residual.
    GreedyFeasibility,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub epsilon: f64,
    /// `M₋₁`; probed from a secant of `∇g` at `λ₀` when absent.
    pub m_init: Option<f64>,
    pub k_max: usize,
    pub i_max: usize,
    pub step_mode: StepMode,
    pub weight_mode: WeightMode,
    /// Defaults to the zero vector.
    pub lambda0: Option<Vector>,
    /// Known `M̄_ε`; required by [`StepMode::FixedMBar`].
    pub m_bar: Option<f64>,
    /// Stop once `dist ≤ ε` and the objective changed by at most
    /// `ε·max(1, |f|)` for ten consecutive iterations.
    pub practical_stop: bool,
    pub spectral: SpectralOptions,
    /// Seed of the initial smoothness probe.
    pub seed: u64,
    /// Record wall-clock time in the trace. Off by default so that traces are
    /// reproducible byte for byte.
    pub record_timing: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            m_init: None,
            k_max: 1000,
            i_max: 60,
            step_mode: StepMode::Backtracking,
            weight_mode: WeightMode::Theoretical,
            lambda0: None,
            m_bar: None,
            practical_stop: true,
            spectral: SpectralOptions::default(),
            seed: 0,
            record_timing: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if let Some(m) = self.m_init {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::Config(format!("m_init must be positive, got {m}")));
            }
        }
        if self.k_max == 0 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        if self.i_max == 0 {
            return Err(Error::Config("i_max must be at least 1".into()));
        }
        if self.step_mode == StepMode::FixedMBar {
            match self.m_bar {
                Some(m) if m > 0.0 && m.is_finite() => {}
                _ => return Err(Error::Config("fixed-M̄ step mode needs a positive m_bar".into())),
            }
        }
        if !(self.spectral.tol > 0.0) {
            return Err(Error::Config("spectral tolerance must be positive".into()));
        }
        Ok(())
    }
}
