//! The universal doubling line-search and the closed-form step for
//! least-squares problems.

use crate::error::{Error, Result};
use crate::linop::Vector;
use crate::oracles::{dual_eval, prox_h, sharp, DualEval, SpectralOptions};
use crate::problem::{ConstraintSet, Objective, Problem};

/// Largest admissible smoothness estimate.
pub const M_CEILING: f64 = 1e30;

/// `Q_M(λ; λ̂) = g(λ̂) + ⟨∇g(λ̂), λ - λ̂⟩ + (M/2)‖λ - λ̂‖²`.
pub fn surrogate_q(lambda: &Vector, lambda_hat: &Vector, g_hat: f64, grad_hat: &Vector, m: f64) -> f64 {
    let d = lambda - lambda_hat;
    g_hat + grad_hat.dot(&d) + 0.5 * m * d.norm_squared()
}

/// The acceptance test `g(λ⁺) ≤ Q_M(λ⁺; λ̂) + δ/2`.
pub fn condition_holds(
    g_next: f64,
    lambda_next: &Vector,
    lambda_hat: &Vector,
    g_hat: f64,
    grad_hat: &Vector,
    m: f64,
    delta: f64,
) -> bool {
    g_next <= surrogate_q(lambda_next, lambda_hat, g_hat, grad_hat, m) + 0.5 * delta
}

#[derive(Clone, Debug)]
pub struct Accepted {
    pub lambda: Vector,
    pub m: f64,
    pub i: usize,
    /// `g`, gradient and primal maximizer at the accepted point.
    pub eval: DualEval,
}

/// Doubling search `M_{k,i} = 2^i·M_start` for the first trial that satisfies
/// the surrogate condition. Each trial costs one `g` evaluation.
pub fn line_search(
    problem: &Problem,
    lambda_hat: &Vector,
    at_hat: &DualEval,
    delta: f64,
    m_start: f64,
    i_max: usize,
    iteration: usize,
    opts: &SpectralOptions,
) -> Result<Accepted> {
    if !(m_start > 0.0) || !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "line search needs M_start > 0 and δ > 0, got {m_start} and {delta}"
        )));
    }
    let mut m = m_start;
    let mut last = lambda_hat.clone();
    for i in 0..=i_max {
        if m > M_CEILING {
            return Err(line_search_failure(iteration, "smoothness estimate overflow", m, last));
        }
        let step = lambda_hat - &at_hat.grad / m;
        let trial = prox_h(&step, 1.0 / m, &problem.constraint);
        let eval = if trial == *lambda_hat {
            at_hat.clone()
        } else {
            dual_eval(problem, &trial, opts)?
        };
        if condition_holds(eval.value, &trial, lambda_hat, at_hat.value, &at_hat.grad, m, delta) {
            return Ok(Accepted { lambda: trial, m, i, eval });
        }
        last = trial;
        m *= 2.0;
    }
    Err(line_search_failure(iteration, "iteration cap reached", m / 2.0, last))
}

fn line_search_failure(iteration: usize, reason: &str, last_m: f64, last_trial: Vector) -> Error {
    Error::LineSearch {
        iteration,
        reason: reason.to_string(),
        last_m,
        last_trial: last_trial.iter().copied().collect(),
    }
}

/// Closed-form step of the least-squares dual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticStep {
    pub alpha: f64,
    /// `P = ‖d‖² + 2σ_X(-Aᵀd) - 2⟨λ̂ - b, d⟩` with `d = ∇g(λ̂)`.
    pub p: f64,
    pub grad_norm_sq: f64,
}

impl AnalyticStep {
    /// Root of `‖d‖²α² + Pα - δ = 0`; `None` for a vanishing gradient.
    pub fn solve(p: f64, grad_norm_sq: f64, delta: f64) -> Option<Self> {
        if grad_norm_sq == 0.0 {
            return None;
        }
        let root = (p * p + 4.0 * delta * grad_norm_sq).sqrt();
        // Both forms are the same root; pick the one without cancellation.
        let alpha = if p >= 0.0 {
            2.0 * delta / (p + root)
        } else {
            (root - p) / (2.0 * grad_norm_sq)
        };
        Some(Self {
            alpha,
            p,
            grad_norm_sq,
        })
    }

    /// `U(α) - (g(λ̂) - (α/2)‖d‖² + δ/2)`, zero by construction.
    pub fn residual(&self, delta: f64) -> f64 {
        0.5 * self.alpha * self.alpha * self.grad_norm_sq + 0.5 * self.alpha * self.p - 0.5 * delta
    }

    /// The upper model `U(α)` of `g(λ̂ - α∇g(λ̂))`.
    pub fn upper_model(&self, g_hat: f64, delta: f64) -> f64 {
        g_hat - 0.5 * self.alpha * self.grad_norm_sq + 0.5 * delta + self.residual(delta)
    }
}

/// Analytic step for least-squares problems over a bounded domain. The
/// support value `σ_X(-Aᵀd)` comes from the domain's sharp-operator.
pub fn analytic_step_quadratic(
    problem: &Problem,
    lambda_hat: &Vector,
    grad: &Vector,
    delta: f64,
    opts: &SpectralOptions,
) -> Result<Option<AnalyticStep>> {
    if problem.objective != Objective::QuadraticSlack || problem.constraint != ConstraintSet::ZeroPoint {
        return Err(Error::Unsupported(
            "analytic step needs a least-squares problem with the zero-point constraint".into(),
        ));
    }
    if !problem.domain.is_bounded() {
        return Err(Error::Unsupported("analytic step needs a bounded domain".into()));
    }
    let at_d = problem.map.adjoint_apply(grad)?;
    let support = sharp(&(-at_d), &problem.domain, &Objective::Zero, opts)?.support_value;
    let gn = grad.norm_squared();
    let p = gn + 2.0 * support - 2.0 * (lambda_hat - &problem.offset).dot(grad);
    Ok(AnalyticStep::solve(p, gn, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::{LinearMap, Matrix};
    use crate::problem::Domain;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_vec(d: usize, rng: &mut ChaCha8Rng) -> Vector {
        Vector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)))
    }

    /// `g(λ) = (L/2)λ²` realized as the dual of `min x²/(2L)`-type data:
    /// `f = ½x²`, `A = √L`, `b = 0` gives `g(λ) = (L/2)λ²`.
    fn scalar_quadratic(l: f64) -> Problem {
        Problem::new(
            Objective::SeparableQuadratic {
                center: Vector::zeros(1),
            },
            LinearMap::Dense(Matrix::from_element(1, 1, l.sqrt())),
            Vector::zeros(1),
            Domain::WholeSpace { dim: 1 },
            ConstraintSet::ZeroPoint,
        )
        .unwrap()
    }

    #[test]
    fn surrogate_examples() {
        let lh = Vector::from_vec(vec![1.0, 2.0]);
        let grad = Vector::from_vec(vec![0.3, -0.1]);
        assert_eq!(surrogate_q(&lh, &lh, 4.5, &grad, 3.0), 4.5);
        let l = &lh + Vector::from_vec(vec![1.0, 0.0]);
        assert_eq!(surrogate_q(&l, &lh, 4.5, &Vector::zeros(2), 2.0), 5.5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b, g) = (random_vec(4, &mut rng), random_vec(4, &mut rng), random_vec(4, &mut rng));
        let direct = 0.7 + g.dot(&(&a - &b)) + 0.5 * 1.3 * (&a - &b).norm_squared();
        assert_eq!(surrogate_q(&a, &b, 0.7, &g, 1.3), direct);
    }

    #[test]
    fn accepts_immediately_above_lipschitz_constant() {
        let p = scalar_quadratic(4.0);
        let opts = SpectralOptions::default();
        let lh = Vector::from_element(1, 1.0);
        let at = dual_eval(&p, &lh, &opts).unwrap();
        let acc = line_search(&p, &lh, &at, 1e-12, 4.0, 60, 0, &opts).unwrap();
        assert_eq!(acc.i, 0);
        let acc = line_search(&p, &lh, &at, 1e-12, 5.0, 60, 0, &opts).unwrap();
        assert_eq!(acc.i, 0);
    }

    #[test]
    fn doubles_up_to_lipschitz_constant() {
        let p = scalar_quadratic(4.0);
        let opts = SpectralOptions::default();
        let lh = Vector::from_element(1, 1.0);
        let at = dual_eval(&p, &lh, &opts).unwrap();
        let acc = line_search(&p, &lh, &at, 1e-14, 1.0, 60, 0, &opts).unwrap();
        assert_eq!((acc.i, acc.m), (2, 4.0));
    }

    #[test]
    fn accepted_pairs_reverify() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = Problem::new(
            Objective::Zero,
            LinearMap::Dense(Matrix::from_fn(4, 5, |_, _| rng.sample(StandardNormal))),
            random_vec(4, &mut rng),
            Domain::L1Ball { dim: 5, radius: 1.0 },
            ConstraintSet::L2Ball { radius: 0.2 },
        )
        .unwrap();
        let opts = SpectralOptions::default();
        for _ in 0..200 {
            let lh = random_vec(4, &mut rng);
            let at = dual_eval(&p, &lh, &opts).unwrap();
            let m0 = 10f64.powf(rng.random_range(-4.0..2.0));
            let acc = line_search(&p, &lh, &at, 1e-3, m0, 60, 0, &opts).unwrap();
            let fresh_hat = dual_eval(&p, &lh, &opts).unwrap();
            let fresh_next = dual_eval(&p, &acc.lambda, &opts).unwrap();
            assert!(condition_holds(fresh_next.value, &acc.lambda, &lh, fresh_hat.value, &fresh_hat.grad, acc.m, 1e-3));
        }
    }

    #[test]
    fn cap_turns_into_error() {
        let p = scalar_quadratic(1e6);
        let opts = SpectralOptions::default();
        let lh = Vector::from_element(1, 1.0);
        let at = dual_eval(&p, &lh, &opts).unwrap();
        match line_search(&p, &lh, &at, 1e-12, 1.0, 3, 7, &opts) {
            Err(Error::LineSearch { iteration, last_m, last_trial, .. }) => {
                assert_eq!(iteration, 7);
                assert_eq!(last_m, 8.0);
                assert_eq!(last_trial.len(), 1);
            }
            other => panic!("expected a line-search failure, got {other:?}"),
        }
    }

    #[test]
    fn analytic_step_examples() {
        let s = AnalyticStep::solve(2.0, 3.0, 0.0).unwrap();
        assert_eq!(s.alpha, 0.0);
        let s = AnalyticStep::solve(0.0, 4.0, 0.09).unwrap();
        assert_abs_diff_eq!(s.alpha, 0.3 / 2.0, epsilon = 1e-15);
        assert!(AnalyticStep::solve(1.0, 0.0, 0.1).is_none());
        for p in [-5.0, -0.1, 0.0, 0.3, 7.0] {
            let s = AnalyticStep::solve(p, 2.5, 1e-3).unwrap();
            assert!(s.residual(1e-3).abs() <= 1e-15);
        }
    }

    #[test]
    fn analytic_step_satisfies_surrogate_condition() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let opts = SpectralOptions::default();
        for trial in 0..20 {
            let domain = if trial % 2 == 0 {
                Domain::L2Ball { dim: 4, radius: 0.7 }
            } else {
                Domain::L1Ball { dim: 4, radius: 1.2 }
            };
            let p = Problem::new(
                Objective::QuadraticSlack,
                LinearMap::Dense(Matrix::from_fn(3, 4, |_, _| rng.sample(StandardNormal))),
                random_vec(3, &mut rng),
                domain,
                ConstraintSet::ZeroPoint,
            )
            .unwrap();
            let lh = random_vec(3, &mut rng);
            let at = dual_eval(&p, &lh, &opts).unwrap();
            let delta = 1e-3;
            let step = analytic_step_quadratic(&p, &lh, &at.grad, delta, &opts).unwrap().unwrap();
            assert!(step.residual(delta).abs() <= 1e-12);
            let next = &lh - &at.grad * step.alpha;
            let g_next = dual_eval(&p, &next, &opts).unwrap().value;
            assert!(g_next <= step.upper_model(at.value, delta) + 1e-12);
            assert!(condition_holds(g_next, &next, &lh, at.value, &at.grad, 1.0 / step.alpha, delta + 1e-12));
        }
    }
}
