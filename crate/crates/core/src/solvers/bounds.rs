//! Checks of the primal convergence certificates against a recorded trace.

use crate::linop::Vector;
use crate::solvers::trace::Trace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Rates `1/(k+1)` of the plain method.
    Plain,
    /// Rates `1/(k+2)^{(1+3ν)/(1+ν)}` of the accelerated method.
    Accelerated,
}

/// Reference data the certificates are stated in.
#[derive(Clone, Debug)]
pub struct BoundInputs<'a> {
    pub f_star: f64,
    pub lambda_star: &'a Vector,
    pub lambda0: &'a Vector,
    pub m_bar: f64,
    pub nu: f64,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    /// Largest violation of the closed-form rate bounds (≤ 0 when they hold).
    pub max_violation: f64,
    pub worst_k: Option<usize>,
    /// Same bounds with the accumulated weight sum `S_k` in place of its
    /// closed-form lower estimate.
    pub max_violation_weighted: f64,
    pub checked: usize,
}

impl BoundReport {
    pub fn holds(&self, slack: f64) -> bool {
        self.max_violation <= slack
    }

    /// True when only the weight-sum variant holds at `slack`.
    pub fn only_weighted_holds(&self, slack: f64) -> bool {
        self.max_violation > slack && self.max_violation_weighted <= slack
    }
}

/// Evaluates, at every recorded `k`,
/// `-‖λ*‖·dist ≤ f - f* ≤ ε/2 + c₁M̄‖λ₀‖²/r_k` and
/// `dist ≤ c₂M̄‖λ₀ - λ*‖/r_k + sqrt(c₃M̄ε/r_k)`
/// with `r_k = k+1, (c₁, c₂, c₃) = (1, 4, 2)` for the plain method and
/// `r_k = (k+2)^{(1+3ν)/(1+ν)}, (c₁, c₂, c₃) = (4, 16, 8)` for the accelerated one.
/// The weighted variant uses `‖λ₀‖²/(2S_k)`, `2‖λ₀ - λ*‖/S_k` and `sqrt(ε/S_k)`.
pub fn theorem_bound_check(trace: &Trace, inputs: &BoundInputs, which: Certificate) -> BoundReport {
    let ls = inputs.lambda_star.norm();
    let l0 = inputs.lambda0.norm();
    let d0 = (inputs.lambda0 - inputs.lambda_star).norm();
    let (m, eps) = (inputs.m_bar, inputs.epsilon);
    let mut worst = f64::NEG_INFINITY;
    let mut worst_k = None;
    let mut worst_weighted = f64::NEG_INFINITY;
    for r in &trace.records {
        let (rate, c1, c2, c3) = match which {
            Certificate::Plain => ((r.k + 1) as f64, 1.0, 4.0, 2.0),
            Certificate::Accelerated => {
                let e = (1.0 + 3.0 * inputs.nu) / (1.0 + inputs.nu);
                ((r.k as f64 + 2.0).powf(e), 4.0, 16.0, 8.0)
            }
        };
        let gap = r.objective - inputs.f_star;
        let lower = -ls * r.feasibility - gap;

        let upper = gap - (0.5 * eps + c1 * m * l0 * l0 / rate);
        let feas = r.feasibility - (c2 * m * d0 / rate + (c3 * m * eps / rate).sqrt());
        let v = lower.max(upper).max(feas);
        if v > worst {
            worst = v;
            worst_k = Some(r.k);
        }

        let s = r.weight_sum;
        let upper_w = gap - (0.5 * eps + l0 * l0 / (2.0 * s));
        let feas_w = r.feasibility - (2.0 * d0 / s + (eps / s).sqrt());
        worst_weighted = worst_weighted.max(lower.max(upper_w).max(feas_w));
    }
    BoundReport {
        max_violation: worst,
        worst_k,
        max_violation_weighted: worst_weighted,
        checked: trace.records.len(),
    }
}

/// `(Ḡ_k - G(λ)) - (‖λ₀ - λ‖²/(2S_k) + ε/2)` at record index `k`; nonpositive
/// when the dual averaging estimate holds at the probe `λ` with value
/// `g_probe = G(λ)`.
pub fn dual_averaging_violation(trace: &Trace, k: usize, lambda0: &Vector, probe: &Vector, g_probe: f64) -> f64 {
    let g_bar = trace.averaged_dual_values()[k];
    let s = trace.records[k].weight_sum;
    (g_bar - g_probe) - ((lambda0 - probe).norm_squared() / (2.0 * s) + 0.5 * trace.epsilon)
}
