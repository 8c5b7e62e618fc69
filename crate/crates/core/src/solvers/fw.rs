//! Frank-Wolfe (conditional gradient) baseline for `min ½‖Ax - b‖²` over `X`.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linop::Vector;
use crate::oracles::{sharp, SpectralOptions};
use crate::problem::{Objective, Primal, Problem};
use crate::solvers::greedy::clamped_quadratic_min;
use crate::solvers::trace::{IterationRecord, SolverOutput, Termination, Trace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepRule {
    /// `γ_k = 2/(k+2)`.
    Harmonic,
    /// Exact minimization along the segment.
    ExactLineSearch,
}

pub fn harmonic_step(k: usize) -> f64 {
    2.0 / (k as f64 + 2.0)
}

/// Runs `k_max` iterations starting from the first linear-minimization atom.
/// Records carry the objective in `objective` and the duality gap
/// `⟨∇φ(x̄_k), x̄_k - x̂_{k+1}⟩` in `g_value`.
pub fn frank_wolfe(
    problem: &Problem,
    rule: StepRule,
    k_max: usize,
    opts: &SpectralOptions,
    record_timing: bool,
) -> Result<SolverOutput> {
    problem.validate()?;
    if problem.objective != Objective::QuadraticSlack {
        return Err(Error::Unsupported(
            "Frank-Wolfe needs a least-squares objective".into(),
        ));
    }
    if !problem.domain.is_bounded() {
        return Err(Error::Unsupported("Frank-Wolfe needs a bounded domain".into()));
    }
    if k_max == 0 {
        return Err(Error::Config("k_max must be at least 1".into()));
    }
    let started = Instant::now();
    let map = &problem.map;
    let b = &problem.offset;
    let lmo = |grad: &Vector| -> Result<Vector> {
        Ok(sharp(&(-grad), &problem.domain, &Objective::Zero, opts)?.x_star)
    };

    let mut x = Vector::zeros(map.input_dim());
    let mut ax = Vector::zeros(map.output_dim());
    let mut atom = lmo(&map.adjoint_apply(&(-b))?)?;
    let mut records = Vec::with_capacity(k_max.min(1 << 16));

    for k in 0..k_max {
        let a_atom = map.apply(&atom)?;
        let gamma = match (k, rule) {
            (0, _) => 1.0,
            (_, StepRule::Harmonic) => harmonic_step(k),
            (_, StepRule::ExactLineSearch) => {
                let r = &ax - b;
                let d = &a_atom - &ax;
                clamped_quadratic_min(0.5 * d.norm_squared(), r.dot(&d))
            }
        };
        x.axpy(gamma, &atom, 1.0 - gamma);
        ax.axpy(gamma, &a_atom, 1.0 - gamma);
        let r = &ax - b;
        let grad = map.adjoint_apply(&r)?;
        let next = lmo(&grad)?;
        let gap = grad.dot(&(&x - &next));
        records.push(IterationRecord {
            k,
            m: 0.0,
            i: 0,
            objective: 0.5 * r.norm_squared(),
            feasibility: 0.0,
            g_value: gap,
            queries: k + 1,
            grad_queries: k + 1,
            weight: gamma,
            weight_sum: 1.0,
            gamma,
            t: 1.0,
            elapsed: if record_timing {
                started.elapsed().as_secs_f64()
            } else {
                0.0
            },
        });
        atom = next;
    }

    let slack = &ax - b;
    Ok(SolverOutput {
        primal: Primal { x, slack: Some(slack) },
        lambda: Vector::zeros(map.output_dim()),
        lambda_average: Vector::zeros(map.output_dim()),
        trace: Trace {
            records,
            termination: Termination::MaxIterations,
            m_init: 0.0,
            epsilon: 0.0,
        },
    })
}
