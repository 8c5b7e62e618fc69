//! Greedy averaging weights: exact minimization of a quadratic metric along
//! the segment from the current average to the newest atom.

use crate::error::{Error, Result};
use crate::problem::{ConstraintSet, Objective, Primal, Problem};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreedyMetric {
    Objective,
    Feasibility,
}

/// Minimizer of `aγ² + bγ` over `[0, 1]`; 0 when the metric is flat.
pub fn clamped_quadratic_min(a: f64, b: f64) -> f64 {
    if a > 0.0 {
        (-b / (2.0 * a)).clamp(0.0, 1.0)
    } else if a + b < 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Weight `γ ∈ [0, 1]` minimizing the selected metric at
/// `(1 - γ)·previous + γ·atom`.
pub fn greedy_weight(previous: &Primal, atom: &Primal, problem: &Problem, metric: GreedyMetric) -> Result<f64> {
    let dx = &atom.x - &previous.x;
    let (a, b) = match metric {
        GreedyMetric::Objective => match &problem.objective {
            Objective::Zero => (0.0, 0.0),
            Objective::SeparableQuadratic { center } => {
                (0.5 * dx.norm_squared(), (&previous.x - center).dot(&dx))
            }
            Objective::QuadraticSlack => {
                let u0 = problem.map.apply(&previous.x)? - &problem.offset;
                let du = problem.map.apply(&dx)?;
                (0.5 * du.norm_squared(), u0.dot(&du))
            }
            Objective::SquaredNuclear { .. } => {
                return Err(Error::Unsupported(
                    "greedy objective weights need a quadratic objective".into(),
                ))
            }
        },
        GreedyMetric::Feasibility => {
            if !matches!(problem.constraint, ConstraintSet::ZeroPoint | ConstraintSet::L2Ball { .. }) {
                return Err(Error::Unsupported(
                    "greedy feasibility weights need a zero-point or l2-ball constraint".into(),
                ));
            }
            let u0 = problem.residual(previous)?;
            let du = problem.residual(atom)? - &u0;
            (du.norm_squared(), 2.0 * u0.dot(&du))
        }
    };
    Ok(clamped_quadratic_min(a, b))
}
