//! The smooth-ish dual component `g` and its gradient.
//!
//! For general problems `g(λ) = max_{x∈X} ⟨λ, b - Ax⟩ - f(x)` and
//! `∇g(λ) = b - A x*(λ)`. Least-squares problems carry a slack block
//! `r = Ax - b` that is eliminated in closed form; their dual is written with
//! the opposite multiplier sign,
//! `g(λ) = ½‖λ‖² - ⟨λ, b⟩ + max_{x∈X} ⟨Aᵀλ, x⟩`, `∇g(λ) = λ - b + A x*(λ)`,
//! and the eliminated slack is `r*(λ) = -λ`.

use crate::error::{Error, Result};
use crate::linop::Vector;
use crate::oracles::sharp::sharp;
use crate::oracles::SpectralOptions;
use crate::problem::{Objective, Primal, Problem};

/// One evaluation of `g` together with the gradient and the primal maximizer
/// it was formed from.
#[derive(Clone, Debug, PartialEq)]
pub struct DualEval {
    pub value: f64,
    pub grad: Vector,
    pub primal: Primal,
}

pub fn dual_eval(problem: &Problem, lambda: &Vector, opts: &SpectralOptions) -> Result<DualEval> {
    let n = problem.map.output_dim();
    if lambda.len() != n {
        return Err(Error::dim("dual point", n, lambda.len()));
    }
    let b = &problem.offset;
    let aty = problem.map.adjoint_apply(lambda)?;
    if problem.has_slack() {
        let sr = sharp(&aty, &problem.domain, &Objective::Zero, opts)?;
        let ax = problem.map.apply(&sr.x_star)?;
        let value = 0.5 * lambda.norm_squared() - lambda.dot(b) + sr.support_value;
        let grad = lambda - b + ax;
        return Ok(DualEval {
            value,
            grad,
            primal: Primal {
                x: sr.x_star,
                slack: Some(-lambda),
            },
        });
    }
    let sr = sharp(&(-aty), &problem.domain, &problem.objective, opts)?;
    let ax = problem.map.apply(&sr.x_star)?;
    Ok(DualEval {
        value: sr.support_value + lambda.dot(b),
        grad: b - ax,
        primal: Primal {
            x: sr.x_star,
            slack: None,
        },
    })
}

pub fn eval_g(problem: &Problem, lambda: &Vector, opts: &SpectralOptions) -> Result<(f64, Primal)> {
    let e = dual_eval(problem, lambda, opts)?;
    Ok((e.value, e.primal))
}

pub fn grad_g(problem: &Problem, lambda: &Vector, opts: &SpectralOptions) -> Result<Vector> {
    Ok(dual_eval(problem, lambda, opts)?.grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::{LinearMap, Matrix};
    use crate::problem::{ConstraintSet, Domain};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn opts() -> SpectralOptions {
        SpectralOptions { max_iter: Some(100_000), ..SpectralOptions::with_tol(1e-12) }
    }

    fn random_vec(d: usize, rng: &mut ChaCha8Rng) -> Vector {
        Vector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)))
    }

    fn random_map(n: usize, p: usize, rng: &mut ChaCha8Rng) -> LinearMap {
        LinearMap::Dense(Matrix::from_fn(n, p, |_, _| rng.sample(StandardNormal)))
    }

    fn kkt_1d() -> Problem {
        Problem::new(
            Objective::SeparableQuadratic {
                center: Vector::zeros(1),
            },
            LinearMap::identity(1),
            Vector::from_element(1, 1.0),
            Domain::WholeSpace { dim: 1 },
            ConstraintSet::ZeroPoint,
        )
        .unwrap()
    }

    #[test]
    fn one_dimensional_conjugate() {
        let p = kkt_1d();
        let l = Vector::from_element(1, -1.0);
        let (g, primal) = eval_g(&p, &l, &opts()).unwrap();
        assert_abs_diff_eq!(g, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(primal.x[0], 1.0, epsilon = 1e-15);
        // Grid maximization of λ(b - x) - ½x² at λ = 0.7.
        let lam = 0.7;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=200_000 {
            let x = -5.0 + 10.0 * i as f64 / 200_000.0;
            best = best.max(lam * (1.0 - x) - 0.5 * x * x);
        }
        let (g, _) = eval_g(&p, &Vector::from_element(1, lam), &opts()).unwrap();
        assert_abs_diff_eq!(g, 0.5 * lam * lam + lam, epsilon = 1e-12);
        assert_abs_diff_eq!(g, best, epsilon = 1e-8);
    }

    #[test]
    fn zero_multiplier_with_zero_objective() {
        let p = Problem::new(
            Objective::Zero,
            LinearMap::identity(3),
            Vector::from_vec(vec![0.1, 0.2, 0.3]),
            Domain::L2Ball { dim: 3, radius: 1.0 },
            ConstraintSet::ZeroPoint,
        )
        .unwrap();
        let (g, _) = eval_g(&p, &Vector::zeros(3), &opts()).unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn squared_nuclear_closed_form() {
        let p = Problem::new(
            Objective::SquaredNuclear { scale: 4.0, rows: 2, cols: 2 },
            LinearMap::identity(4),
            Vector::zeros(4),
            Domain::WholeSpace { dim: 4 },
            ConstraintSet::ZeroPoint,
        )
        .unwrap();
        let eye = Vector::from_vec(vec![1.0, 0.0, 0.0, 1.0]);
        let (g, _) = eval_g(&p, &eye, &opts()).unwrap();
        assert_abs_diff_eq!(g, 1.0, epsilon = 1e-12);

        // Direct maximization over rank-one candidates t·uvᵀ.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lam = random_vec(4, &mut rng);
        let (g, _) = eval_g(&p, &lam, &opts()).unwrap();
        let mut best = f64::NEG_INFINITY;
        for _ in 0..20_000 {
            let u = random_vec(2, &mut rng).normalize();
            let v = random_vec(2, &mut rng).normalize();
            let x = crate::problem::flatten(&(&u * v.transpose()));
            let s = -lam.dot(&x);
            // max_t t·s - t²/4 = s².
            best = best.max(s * s);
        }
        assert!(best <= g + 1e-9);
        assert!(g - best <= 1e-3 * g.max(1.0));
    }

    #[test]
    fn gradient_matches_central_differences_on_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_vec(5, &mut rng);
        let p = Problem::new(
            Objective::SeparableQuadratic { center: c },
            random_map(3, 5, &mut rng),
            random_vec(3, &mut rng),
            Domain::WholeSpace { dim: 5 },
            ConstraintSet::ZeroPoint,
        )
        .unwrap();
        let lam = random_vec(3, &mut rng);
        let grad = grad_g(&p, &lam, &opts()).unwrap();
        let h = 1e-5;
        for i in 0..3 {
            let mut e = Vector::zeros(3);
            e[i] = h;
            let fd = (eval_g(&p, &(&lam + &e), &opts()).unwrap().0 - eval_g(&p, &(&lam - &e), &opts()).unwrap().0) / (2.0 * h);
            assert_abs_diff_eq!(grad[i], fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn squared_nuclear_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = Problem::new(
            Objective::SquaredNuclear { scale: 3.0, rows: 3, cols: 2 },
            random_map(4, 6, &mut rng),
            random_vec(4, &mut rng),
            Domain::WholeSpace { dim: 6 },
            ConstraintSet::ZeroPoint,
        )
        .unwrap();
        let lam = random_vec(4, &mut rng);
        let grad = grad_g(&p, &lam, &opts()).unwrap();
        let h = 1e-6;
        for i in 0..4 {
            let mut e = Vector::zeros(4);
            e[i] = h;
            let fd = (eval_g(&p, &(&lam + &e), &opts()).unwrap().0 - eval_g(&p, &(&lam - &e), &opts()).unwrap().0) / (2.0 * h);
            assert!((grad[i] - fd).abs() <= 1e-5 * grad.norm().max(1.0), "{} vs {fd}", grad[i]);
        }
    }

    #[test]
    fn singleton_domain_has_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let map = random_map(3, 4, &mut rng);
        let xhat = random_vec(4, &mut rng);
        let b = map.apply(&xhat).unwrap();
        let p = Problem::new(
            Objective::Zero,
            map,
            b,
            Domain::Singleton { point: xhat },
            ConstraintSet::ZeroPoint,
        )
        .unwrap();
        for _ in 0..5 {
            let grad = grad_g(&p, &random_vec(3, &mut rng), &opts()).unwrap();
            assert!(grad.norm() <= 1e-12);
        }
    }

    #[test]
    fn l2_ball_gradient_example() {
        let p = Problem::new(
            Objective::Zero,
            LinearMap::identity(2),
            Vector::zeros(2),
            Domain::L2Ball { dim: 2, radius: 1.0 },
            ConstraintSet::ZeroPoint,
        )
        .unwrap();
        let e = dual_eval(&p, &Vector::from_vec(vec![2.0, 0.0]), &opts()).unwrap();
        assert_eq!(e.primal.x, Vector::from_vec(vec![-1.0, 0.0]));
        assert_eq!(e.grad, Vector::from_vec(vec![1.0, 0.0]));
    }

    #[test]
    fn slack_dual_matches_closed_form_on_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let map = random_map(4, 3, &mut rng);
        let b = random_vec(4, &mut rng);
        let p = Problem::new(
            Objective::QuadraticSlack,
            map.clone(),
            b.clone(),
            Domain::L2Ball { dim: 3, radius: 0.8 },
            ConstraintSet::ZeroPoint,
        )
        .unwrap();
        let lam = random_vec(4, &mut rng);
        let e = dual_eval(&p, &lam, &opts()).unwrap();
        let closed = 0.5 * lam.norm_squared() - lam.dot(&b) + 0.8 * map.adjoint_apply(&lam).unwrap().norm();
        assert_abs_diff_eq!(e.value, closed, epsilon = 1e-12);
        assert_eq!(e.primal.slack.unwrap(), -&lam);
    }

    #[test]
    fn subgradient_inequality_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let problems = vec![
            Problem::new(
                Objective::Zero,
                random_map(4, 6, &mut rng),
                random_vec(4, &mut rng),
                Domain::L1Ball { dim: 6, radius: 1.0 },
                ConstraintSet::L2Ball { radius: 0.1 },
            )
            .unwrap(),
            Problem::new(
                Objective::Zero,
                random_map(3, 9, &mut rng),
                random_vec(3, &mut rng),
                Domain::Spectrahedron { side: 3 },
                ConstraintSet::ZeroPoint,
            )
            .unwrap(),
            Problem::new(
                Objective::QuadraticSlack,
                random_map(5, 6, &mut rng),
                random_vec(5, &mut rng),
                Domain::NuclearBall { rows: 2, cols: 3, radius: 1.0 },
                ConstraintSet::ZeroPoint,
            )
            .unwrap(),
        ];
        for p in &problems {
            let n = p.map.output_dim();
            for _ in 0..300 {
                let l1 = random_vec(n, &mut rng);
                let l2 = random_vec(n, &mut rng);
                let e1 = dual_eval(p, &l1, &opts()).unwrap();
                let g2 = eval_g(p, &l2, &opts()).unwrap().0;
                let slack = 1e-7 * (1.0 + (&l1 - &l2).norm_squared());
                assert!(g2 >= e1.value + e1.grad.dot(&(&l2 - &l1)) - slack);
            }
        }
    }
}
