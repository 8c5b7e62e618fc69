//! Universal primal-dual solvers, the Frank-Wolfe baseline and the
//! certificate utilities.

pub mod bounds;
pub mod config;
pub mod fw;
pub mod greedy;
pub mod holder;
pub mod linesearch;
pub mod primal_dual;
pub mod trace;

pub use bounds::{dual_averaging_violation, theorem_bound_check, BoundInputs, BoundReport, Certificate};
pub use config::{SolverConfig, StepMode, WeightMode};
pub use fw::{frank_wolfe, StepRule};
pub use greedy::{greedy_weight, GreedyMetric};
pub use holder::{complexity_bounds, m_bar_eps, HolderModel};
pub use linesearch::{analytic_step_quadratic, line_search, surrogate_q, AnalyticStep};
pub use primal_dual::{acc_unipd_grad, next_t, run, unipd_grad, Variant};
pub use trace::{IterationRecord, SolverOutput, SolverState, Termination, Trace};

/// The solvers selectable from configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum SolverKind {
    #[serde(rename = "unipd")]
    UniPd,
    #[serde(rename = "acc-unipd")]
    AccUniPd,
    #[serde(rename = "fw-harmonic")]
    FwHarmonic,
    #[serde(rename = "fw-linesearch")]
    FwLineSearch,
}

impl SolverKind {
    pub const ALL: [SolverKind; 4] = [
        SolverKind::UniPd,
        SolverKind::AccUniPd,
        SolverKind::FwHarmonic,
        SolverKind::FwLineSearch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::UniPd => "unipd",
            SolverKind::AccUniPd => "acc-unipd",
            SolverKind::FwHarmonic => "fw-harmonic",
            SolverKind::FwLineSearch => "fw-linesearch",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    pub fn solve(self, problem: &crate::problem::Problem, config: &SolverConfig) -> crate::error::Result<SolverOutput> {
        match self {
            SolverKind::UniPd => unipd_grad(problem, config),
            SolverKind::AccUniPd => acc_unipd_grad(problem, config),
            SolverKind::FwHarmonic => {
                frank_wolfe(problem, StepRule::Harmonic, config.k_max, &config.spectral, config.record_timing)
            }
            SolverKind::FwLineSearch => frank_wolfe(
                problem,
                StepRule::ExactLineSearch,
                config.k_max,
                &config.spectral,
                config.record_timing,
            ),
        }
    }
}
