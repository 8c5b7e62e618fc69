//! High-accuracy reference solutions used by the certificate checks.

use crate::error::{Error, Result};
use crate::linop::Vector;
use crate::oracles::{eval_g, eval_h, SpectralOptions};
use crate::problem::{ConstraintSet, Domain, Objective, Primal, Problem};
use crate::solvers::{acc_unipd_grad, SolverConfig};

/// Iterations of the accelerated run used when no closed form applies.
pub const LONG_RUN_ITERATIONS: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceMethod {
    /// Linear solve of the optimality system of an equality-constrained quadratic.
    ClosedForm,
    /// Long accelerated run at a hundredth of the requested accuracy.
    LongRun,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceSolution {
    pub x: Vector,
    pub f_star: f64,
    pub lambda: Vector,
    pub method: ReferenceMethod,
    /// KKT residual (closed form) or primal-dual gap plus infeasibility (long run).
    pub accuracy: f64,
    /// `accuracy` reached the requested level.
    pub converged: bool,
}

/// Whether [`reference_solve`] takes the closed-form path.
pub fn has_closed_form(problem: &Problem) -> bool {
    matches!(problem.objective, Objective::SeparableQuadratic { .. })
        && matches!(problem.domain, Domain::WholeSpace { .. })
        && problem.constraint == ConstraintSet::ZeroPoint
}

fn closed_form(problem: &Problem, center: &Vector, accuracy: f64) -> Result<ReferenceSolution> {
    // x = c - Aᵀλ with A A ᵀλ = Ac - b.
    let a = problem.map.to_dense();
    let gram = &a * a.transpose();
    let rhs = &a * center - &problem.offset;
    let cutoff = 1e-12 * gram.amax().max(1.0);
    let lambda = gram
        .svd(true, true)
        .solve(&rhs, cutoff)
        .map_err(|e| Error::InvalidArgument(format!("optimality system: {e}")))?;
    let x = center - a.transpose() * &lambda;
    let residual = (&a * &x - &problem.offset).norm();
    let f_star = 0.5 * (&x - center).norm_squared();
    Ok(ReferenceSolution {
        x,
        f_star,
        lambda,
        method: ReferenceMethod::ClosedForm,
        accuracy: residual,
        converged: residual <= accuracy,
    })
}

fn dual_objective(problem: &Problem, lambda: &Vector, opts: &SpectralOptions) -> Result<f64> {
    Ok(eval_g(problem, lambda, opts)?.0 + eval_h(lambda, &problem.constraint))
}

/// Reference optimum of `problem` to the requested `accuracy`. The long run
/// returns its best effort with `converged = false` when the gap stays above it.
pub fn reference_solve(problem: &Problem, accuracy: f64) -> Result<ReferenceSolution> {
    if !(accuracy > 0.0) {
        return Err(Error::InvalidArgument(format!("accuracy must be positive, got {accuracy}")));
    }
    if has_closed_form(problem) {
        if let Objective::SeparableQuadratic { center } = &problem.objective {
            return closed_form(problem, center, accuracy);
        }
    }

    let config = SolverConfig {
        epsilon: accuracy / 100.0,
        k_max: LONG_RUN_ITERATIONS,
        practical_stop: false,
        spectral: SpectralOptions::with_tol(1e-10),
        ..SolverConfig::default()
    };
    let out = acc_unipd_grad(problem, &config)?;
    let opts = &config.spectral;
    let lower = -dual_objective(problem, &out.lambda, opts)?
        .min(dual_objective(problem, &out.lambda_average, opts)?);

    let (x, f_star, infeasibility) = if problem.has_slack() {
        // Every point of X completes to a feasible pair, so the best of the
        // average and the primal responses at the final duals is an upper bound.
        let mut best = (problem.least_squares_value(&out.primal.x)?, out.primal.x);
        for lambda in [&out.lambda, &out.lambda_average] {
            let x = eval_g(problem, lambda, opts)?.1.x;
            let f = problem.least_squares_value(&x)?;
            if f < best.0 {
                best = (f, x);
            }
        }
        (best.1, best.0, 0.0)
    } else {
        let f = problem.objective_value(&out.primal);
        let dist = problem.feasibility(&out.primal)?;
        (out.primal.x, f, dist)
    };
    let acc = (f_star - lower).abs().max(infeasibility);
    Ok(ReferenceSolution {
        x,
        f_star,
        lambda: out.lambda,
        method: ReferenceMethod::LongRun,
        accuracy: acc,
        converged: acc <= accuracy,
    })
}

/// `f` at the reference point, with the slack completed when needed.
pub fn reference_primal(problem: &Problem, x: &Vector) -> Result<Primal> {
    let slack = if problem.has_slack() {
        Some(problem.map.apply(x)? - &problem.offset)
    } else {
        None
    };
    Ok(Primal { x: x.clone(), slack })
}
