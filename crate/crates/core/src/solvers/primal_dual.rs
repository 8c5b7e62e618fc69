//! The universal primal-dual gradient method and its accelerated variant.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::linop::{random_unit, Vector};
use crate::oracles::{dual_eval, eval_h, DualEval};
use crate::problem::{Primal, Problem};
use crate::solvers::config::{SolverConfig, StepMode, WeightMode};
use crate::solvers::greedy::{greedy_weight, GreedyMetric};
use crate::solvers::linesearch::{analytic_step_quadratic, line_search, Accepted};
use crate::solvers::trace::{IterationRecord, SolverOutput, SolverState, Termination, Trace};

const M_FLOOR: f64 = 1e-30;
const PROBE_CLAMP: (f64, f64) = (1e-6, 1e6);
const PRACTICAL_WINDOW: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Plain,
    Accelerated,
}

/// Plain method: prox-gradient steps from `λ_k`, line-search restarted at
/// `M_{k-1}/2`, weights `1/M_k`.
pub fn unipd_grad(problem: &Problem, config: &SolverConfig) -> Result<SolverOutput> {
    run(problem, config, Variant::Plain, None)
}

/// Accelerated method: steps from the momentum point `λ̂_k`, monotone
/// line-search, weights `t_k/M_k`.
pub fn acc_unipd_grad(problem: &Problem, config: &SolverConfig) -> Result<SolverOutput> {
    run(problem, config, Variant::Accelerated, None)
}

/// `t_{k+1} = (1 + sqrt(1 + 4t_k²)) / 2`.
pub fn next_t(t: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt())
}

/// `M₋₁` from the secant `‖∇g(λ₀ + u) - ∇g(λ₀)‖` over a seeded unit `u`.
pub fn probe_initial_m(problem: &Problem, lambda0: &Vector, at0: &DualEval, config: &SolverConfig) -> Result<f64> {
    let u = random_unit(lambda0.len(), config.seed);
    let shifted = dual_eval(problem, &(lambda0 + &u), &config.spectral)?;
    let m = (&shifted.grad - &at0.grad).norm();
    Ok(if m.is_finite() {
        m.clamp(PROBE_CLAMP.0, PROBE_CLAMP.1)
    } else {
        PROBE_CLAMP.1
    })
}

fn take_step(
    problem: &Problem,
    config: &SolverConfig,
    lambda_hat: &Vector,
    at_hat: &DualEval,
    delta: f64,
    m_start: f64,
    k: usize,
) -> Result<Accepted> {
    Ok(match config.step_mode {
        StepMode::Backtracking | StepMode::FixedMBar => line_search(
            problem,
            lambda_hat,
            at_hat,
            delta,
            m_start,
            config.i_max,
            k,
            &config.spectral,
        )?,
        StepMode::AnalyticQuadratic => {
            match analytic_step_quadratic(problem, lambda_hat, &at_hat.grad, delta, &config.spectral)? {
                Some(step) if step.alpha > 0.0 => {
                    let lambda = lambda_hat - &at_hat.grad * step.alpha;
                    let eval = dual_eval(problem, &lambda, &config.spectral)?;
                    Accepted {
                        lambda,
                        m: 1.0 / step.alpha,
                        i: 0,
                        eval,
                    }
                }
                _ => Accepted {
                    lambda: lambda_hat.clone(),
                    m: m_start,
                    i: 0,
                    eval: at_hat.clone(),
                },
            }
        }
    })
}

/// Shared driver of both methods. The observer sees every iteration.
pub fn run(
    problem: &Problem,
    config: &SolverConfig,
    variant: Variant,
    mut observer: Option<&mut dyn FnMut(&SolverState)>,
) -> Result<SolverOutput> {
    config.validate()?;
    problem.validate()?;
    let n = problem.map.output_dim();
    let lambda0 = config.lambda0.clone().unwrap_or_else(|| Vector::zeros(n));
    if lambda0.len() != n {
        return Err(Error::dim("lambda0", n, lambda0.len()));
    }
    let started = Instant::now();
    let opts = &config.spectral;
    let eps = config.epsilon;

    let mut at_lambda = dual_eval(problem, &lambda0, opts)?;
    let m_init = match (config.step_mode, config.m_init) {
        (StepMode::FixedMBar, _) => config.m_bar.expect("validated"),
        (_, Some(m)) => m,
        (_, None) => probe_initial_m(problem, &lambda0, &at_lambda, config)?,
    };

    let mut lambda = lambda0.clone();
    let mut lambda_hat = lambda0;
    let mut m_prev = m_init;
    let mut t = 1.0;
    let mut s_sum = 0.0;
    let mut average = Primal::zeros(problem);
    let mut lambda_average = Vector::zeros(n);
    let mut g_queries = 0usize;
    let mut grad_queries = 0usize;
    let mut records = Vec::with_capacity(config.k_max.min(1 << 16));
    let mut termination = Termination::MaxIterations;
    let mut calm = 0usize;
    let mut prev_obj = f64::NAN;

    for k in 0..config.k_max {
        let (m_start, delta) = match (variant, config.step_mode) {
            (_, StepMode::FixedMBar) => (m_prev, eps),
            (Variant::Plain, _) => ((0.5 * m_prev).max(M_FLOOR), eps),
            (Variant::Accelerated, _) => (m_prev, eps / t),
        };
        let at_hat = match variant {
            Variant::Plain => at_lambda.clone(),
            Variant::Accelerated if k == 0 => at_lambda.clone(),
            Variant::Accelerated => dual_eval(problem, &lambda_hat, opts)?,
        };
        grad_queries += 1;

        let accepted = take_step(problem, config, &lambda_hat, &at_hat, delta, m_start, k)?;
        g_queries += accepted.i
            + match variant {
                Variant::Plain => 1,
                Variant::Accelerated => 2,
            };

        let w = match variant {
            Variant::Plain => 1.0 / accepted.m,
            Variant::Accelerated => t / accepted.m,
        };
        s_sum += w;
        let gamma = if k == 0 {
            1.0
        } else {
            match config.weight_mode {
                WeightMode::Theoretical => w / s_sum,
                WeightMode::GreedyObjective => {
                    greedy_weight(&average, &at_hat.primal, problem, GreedyMetric::Objective)?
                }
                WeightMode::GreedyFeasibility => {
                    greedy_weight(&average, &at_hat.primal, problem, GreedyMetric::Feasibility)?
                }
            }
        };
        average.blend(&at_hat.primal, gamma);
        lambda_average.axpy(w / s_sum, &accepted.lambda, 1.0 - w / s_sum);

        let objective = problem.objective_value(&average);
        let feasibility = problem.feasibility(&average)?;
        let g_value = accepted.eval.value + eval_h(&accepted.lambda, &problem.constraint);
        records.push(IterationRecord {
            k,
            m: accepted.m,
            i: accepted.i,
            objective,
            feasibility,
            g_value,
            queries: g_queries,
            grad_queries,
            weight: w,
            weight_sum: s_sum,
            gamma,
            t,
            elapsed: if config.record_timing {
                started.elapsed().as_secs_f64()
            } else {
                0.0
            },
        });
        if let Some(obs) = observer.as_mut() {
            obs(&SolverState {
                k,
                lambda: &lambda,
                lambda_hat: &lambda_hat,
                lambda_next: &accepted.lambda,
                g_hat: at_hat.value,
                grad_hat: &at_hat.grad,
                g_next: accepted.eval.value,
                m: accepted.m,
                i: accepted.i,
                delta,
                w,
                s: s_sum,
                gamma,
                t,
                average: &average,
                g_queries,
                grad_queries,
            });
        }

        // A fixed dual point only ends the run once the average has caught up
        // with its primal response; until then the average keeps moving.
        let stationary =
            accepted.lambda == lambda_hat && lambda_hat == lambda && average == at_hat.primal;
        m_prev = accepted.m;
        match variant {
            Variant::Plain => {
                lambda = accepted.lambda;
                lambda_hat = lambda.clone();
                at_lambda = accepted.eval;
            }
            Variant::Accelerated => {
                let t_next = next_t(t);
                let beta = (t - 1.0) / t_next;
                lambda_hat = &accepted.lambda + (&accepted.lambda - &lambda) * beta;
                lambda = accepted.lambda;
                t = t_next;
            }
        }
        if stationary {
            termination = Termination::StationaryDual;
            break;
        }
        if config.practical_stop {
            let steady = (objective - prev_obj).abs() <= eps * objective.abs().max(1.0);
            calm = if feasibility <= eps && steady { calm + 1 } else { 0 };
            if calm >= PRACTICAL_WINDOW {
                termination = Termination::PracticalStop;
                break;
            }
        }
        prev_obj = objective;
    }

    Ok(SolverOutput {
        primal: average,
        lambda,
        lambda_average,
        trace: Trace {
            records,
            termination,
            m_init,
            epsilon: eps,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linop::{LinearMap, Matrix};
    use crate::problem::{ConstraintSet, Domain, Objective};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

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

    fn quiet(k_max: usize) -> SolverConfig {
        SolverConfig {
            k_max,
            practical_stop: false,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn t_sequence_values() {
        // Frozen from a 30-digit evaluation of the recurrence.
        let t1 = next_t(1.0);
        assert_abs_diff_eq!(t1, 1.618_033_988_749_895, epsilon = 1e-15);
        assert_abs_diff_eq!(next_t(t1), 2.193_527_085_331_054, epsilon = 1e-15);
    }

    #[test]
    fn both_methods_solve_the_scalar_kkt_problem() {
        let p = kkt_1d();
        for out in [unipd_grad(&p, &quiet(3000)).unwrap(), acc_unipd_grad(&p, &quiet(3000)).unwrap()] {
            assert!((out.primal.x[0] - 1.0).abs() <= 1e-2, "{}", out.primal.x[0]);
            assert!((out.lambda[0] + 1.0).abs() <= 1e-2);
        }
    }

    #[test]
    fn singleton_domain_stays_put() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = Matrix::from_fn(3, 4, |_, _| rng.sample(StandardNormal));
        let xhat = Vector::from_fn(4, |_, _| rng.sample(StandardNormal));
        let b = &a * &xhat;
        let p = Problem::new(
            Objective::Zero,
            LinearMap::Dense(a),
            b,
            Domain::Singleton { point: xhat.clone() },
            ConstraintSet::ZeroPoint,
        )
        .unwrap();
        let out = unipd_grad(&p, &quiet(20)).unwrap();
        assert_eq!(out.primal.x, xhat);
        assert!(out.trace.records.iter().all(|r| r.feasibility <= 1e-12));
    }

    #[test]
    fn query_counts_follow_the_identity() {
        let p = kkt_1d();
        for (variant, c) in [(Variant::Plain, 1), (Variant::Accelerated, 2)] {
            let out = run(&p, &quiet(200), variant, None).unwrap();
            let mut sum = 0;
            for r in &out.trace.records {
                sum += r.i + c;
                assert_eq!(r.queries, sum);
            }
        }
    }

    #[test]
    fn plain_query_count_telescopes() {
        // M_k = 2^{i_k}·M_{k-1}/2, so Σ(i_j + 1) = 2(k+1) + log₂(M_k/M₋₁).
        let p = kkt_1d();
        let out = unipd_grad(&p, &quiet(300)).unwrap();
        for r in &out.trace.records {
            let formula = 2.0 * (r.k + 1) as f64 + (r.m / out.trace.m_init).log2();
            assert_abs_diff_eq!(r.queries as f64, formula, epsilon = 1e-9);
        }
    }

    #[test]
    fn practical_stop_fires() {
        let p = kkt_1d();
        let cfg = SolverConfig {
            k_max: 100_000,
            epsilon: 1e-3,
            ..SolverConfig::default()
        };
        let out = acc_unipd_grad(&p, &cfg).unwrap();
        assert_eq!(out.trace.termination, Termination::PracticalStop);
        assert!(out.trace.records.len() < 100_000);
    }

    #[test]
    fn stationary_start_terminates() {
        let p = kkt_1d();
        let cfg = SolverConfig {
            lambda0: Some(Vector::from_element(1, -1.0)),
            ..quiet(50)
        };
        let out = unipd_grad(&p, &cfg).unwrap();
        assert_eq!(out.trace.termination, Termination::StationaryDual);
        assert_eq!(out.trace.records.len(), 1);
        assert_abs_diff_eq!(out.primal.x[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn runs_are_bitwise_reproducible() {
        let p = kkt_1d();
        let a = acc_unipd_grad(&p, &quiet(300)).unwrap();
        let b = acc_unipd_grad(&p, &quiet(300)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let p = kkt_1d();
        let bad = SolverConfig {
            epsilon: 0.0,
            ..SolverConfig::default()
        };
        assert!(matches!(unipd_grad(&p, &bad), Err(Error::Config(_))));
        let bad = SolverConfig {
            step_mode: StepMode::FixedMBar,
            ..SolverConfig::default()
        };
        assert!(matches!(unipd_grad(&p, &bad), Err(Error::Config(_))));
        let bad = SolverConfig {
            lambda0: Some(Vector::zeros(2)),
            ..SolverConfig::default()
        };
        assert!(matches!(unipd_grad(&p, &bad), Err(Error::Dimension { .. })));
    }
}
