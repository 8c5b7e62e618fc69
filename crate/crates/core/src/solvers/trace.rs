use crate::linop::Vector;
use crate::problem::Primal;

/// One iteration of a solver run.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Accepted smoothness estimate `M_k` (0 for Frank-Wolfe).
    pub m: f64,
    /// Accepted line-search index `i_k`.
    pub i: usize,
    /// `f` at the current primal average.
    pub objective: f64,
    /// `dist(A x̄_k - b, K)`.
    pub feasibility: f64,
    /// `G(λ_{k+1})` for the primal-dual methods; the duality gap for
    /// Frank-Wolfe.
    pub g_value: f64,
    /// Cumulative `g`-queries `N(k)`.
    pub queries: usize,
    /// Cumulative gradient formations.
    pub grad_queries: usize,
    pub weight: f64,
    pub weight_sum: f64,
    pub gamma: f64,
    /// Acceleration scalar `t_k` (1 for the non-accelerated methods).
    pub t: f64,
    pub elapsed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    MaxIterations,
    PracticalStop,
    /// The dual iterate became a fixed point of the prox-gradient map.
    StationaryDual,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::MaxIterations => "max-iterations",
            Termination::PracticalStop => "practical-stop",
            Termination::StationaryDual => "stationary-dual",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub records: Vec<IterationRecord>,
    pub termination: Termination,
    pub m_init: f64,
    pub epsilon: f64,
}

impl Trace {
    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    /// `Ḡ_k = (1/S_k) Σ_{i≤k} w_i G(λ_{i+1})` for every recorded `k`.
    pub fn averaged_dual_values(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.records
            .iter()
            .map(|r| {
                acc += r.weight * r.g_value;
                acc / r.weight_sum
            })
            .collect()
    }
}

/// What a solver hands back.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverOutput {
    /// The primal average `x̄_k` (or `x̿_k`).
    pub primal: Primal,
    /// Last dual iterate `λ_{k+1}`.
    pub lambda: Vector,
    /// Weighted dual average `Σ w_i λ_{i+1} / S_k`.
    pub lambda_average: Vector,
    pub trace: Trace,
}

/// Per-iteration view handed to observers.
#[derive(Debug)]
pub struct SolverState<'a> {
    pub k: usize,
    pub lambda: &'a Vector,
    pub lambda_hat: &'a Vector,
    pub lambda_next: &'a Vector,
    pub g_hat: f64,
    pub grad_hat: &'a Vector,
    pub g_next: f64,
    pub m: f64,
    pub i: usize,
    pub delta: f64,
    pub w: f64,
    pub s: f64,
    pub gamma: f64,
    pub t: f64,
    pub average: &'a Primal,
    pub g_queries: usize,
    pub grad_queries: usize,
}
