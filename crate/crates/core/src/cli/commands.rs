//! The `solve`, `gen` and `check` verbs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::{reference_solve, rmse, McFormulation, McSpec, QtSpec, ReferenceSolution};
use crate::linop::Vector;
use crate::problem::{reshape, Problem};
use crate::solvers::{theorem_bound_check, BoundInputs, Certificate, HolderModel, SolverKind, SolverOutput};

use super::config::{ReferenceSpec, RunConfig};
use super::csv_trace::{format_float, write_trace};
use super::schema::{GeneratorSpec, LoadedProblem, ProblemFile};

/// Configuration problems exit with 2, solver problems with 1.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

impl Failure {
    pub fn config(error: Error) -> Self {
        Self { code: 2, error }
    }

    pub fn solver(error: Error) -> Self {
        Self { code: 1, error }
    }
}

pub const DEFAULT_REFERENCE_ACCURACY: f64 = 1e-8;

/// Accuracy used when a reference is requested from the command line.
fn reference_accuracy(cfg: &RunConfig) -> f64 {
    match cfg.reference {
        Some(ReferenceSpec::Compute { accuracy }) => accuracy,
        _ => DEFAULT_REFERENCE_ACCURACY,
    }
}

/// `f*` and, when known, `λ*`.
pub struct Reference {
    pub f_star: f64,
    pub lambda_star: Option<Vector>,
    pub computed: Option<ReferenceSolution>,
}

fn resolve_reference(cfg: &RunConfig, problem: &Problem, force: bool) -> std::result::Result<Option<Reference>, Failure> {
    let compute = |accuracy: f64| -> std::result::Result<Option<Reference>, Failure> {
        let r = reference_solve(problem, accuracy).map_err(Failure::solver)?;
        Ok(Some(Reference {
            f_star: r.f_star,
            lambda_star: Some(r.lambda.clone()),
            computed: Some(r),
        }))
    };
    match (&cfg.reference, force) {
        (Some(ReferenceSpec::Given { f_star, lambda_star }), false) => {
            let lambda_star = lambda_star.clone().map(Vector::from_vec);
            if let Some(l) = &lambda_star {
                if l.len() != problem.map.output_dim() {
                    return Err(Failure::config(Error::Config(format!(
                        "lambda_star has length {}, expected {}",
                        l.len(),
                        problem.map.output_dim()
                    ))));
                }
            }
            Ok(Some(Reference { f_star: *f_star, lambda_star, computed: None }))
        }
        (Some(ReferenceSpec::Compute { accuracy }), _) => compute(*accuracy),
        (_, true) => compute(reference_accuracy(cfg)),
        (None, false) => Ok(None),
    }
}

/// Runs every selected solver concurrently on the shared problem.
pub fn run_solvers(problem: &Problem, cfg: &RunConfig, kinds: &[SolverKind]) -> Vec<(SolverKind, Result<SolverOutput>)> {
    let config = cfg.solver_config();
    std::thread::scope(|scope| {
        let handles: Vec<_> = kinds
            .iter()
            .map(|&kind| {
                let config = &config;
                (kind, scope.spawn(move || kind.solve(problem, config)))
            })
            .collect();
        handles
            .into_iter()
            .map(|(kind, h)| (kind, h.join().expect("solver thread panicked")))
            .collect()
    })
}

fn load(cfg: &RunConfig) -> std::result::Result<LoadedProblem, Failure> {
    cfg.load_problem().map_err(Failure::config)
}

fn completion_rmse(loaded: &LoadedProblem, out: &SolverOutput) -> Option<f64> {
    let inst = loaded.completion.as_ref()?;
    if inst.test.is_empty() {
        return None;
    }
    rmse(&reshape(&out.primal.x, inst.rows, inst.cols), &inst.test).ok()
}

pub fn trace_path(dir: &Path, kind: SolverKind) -> PathBuf {
    dir.join(format!("{}.csv", kind.name()))
}

pub fn solve(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<(), Failure> {
    let loaded = load(cfg)?;
    let problem = &loaded.problem;
    let reference = resolve_reference(cfg, problem, false)?;
    let f_star = reference.as_ref().map(|r| r.f_star);

    let dir = cfg.output_dir();
    fs::create_dir_all(&dir).map_err(|e| Failure::config(e.into()))?;
    let results = run_solvers(problem, cfg, &cfg.solvers);

    let mut header = vec!["solver", "iterations", "status", "obj", "feas", "queries"];
    if f_star.is_some() {
        header.push("obj_residual");
    }
    if loaded.completion.as_ref().is_some_and(|c| !c.test.is_empty()) {
        header.push("test_rmse");
    }
    let _ = writeln!(out, "{}", header.join("\t"));
    let mut first_failure = None;
    for (kind, result) in results {
        match result {
            Ok(output) => {
                let file = fs::File::create(trace_path(&dir, kind)).map_err(|e| Failure::config(e.into()))?;
                write_trace(std::io::BufWriter::new(file), &output.trace, f_star).map_err(Failure::config)?;
                let last = output.trace.last().expect("at least one iteration");
                let mut row = vec![
                    kind.name().to_string(),
                    output.trace.records.len().to_string(),
                    output.trace.termination.as_str().to_string(),
                    format_float(last.objective),
                    format_float(last.feasibility),
                    last.queries.to_string(),
                ];
                if let Some(f) = f_star {
                    row.push(format_float(last.objective - f));
                }
                if let Some(r) = completion_rmse(&loaded, &output) {
                    row.push(format_float(r));
                }
                let _ = writeln!(out, "{}", row.join("\t"));
            }
            Err(e) => {
                let _ = writeln!(out, "{}\t-\tfailed", kind.name());
                let _ = writeln!(err, "{}: {e}", kind.name());
                first_failure.get_or_insert(e);
            }
        }
    }
    match first_failure {
        Some(e) => Err(Failure::solver(e)),
        None => Ok(()),
    }
}

pub enum GenKind {
    Qt(QtSpec),
    Mc { spec: McSpec, formulation: McFormulation },
}

/// Writes a generated problem file and reports its size.
pub fn gen(kind: GenKind, path: Option<&Path>, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    let generator = match kind {
        GenKind::Qt(spec) => GeneratorSpec::Qt(spec),
        GenKind::Mc { spec, formulation } => GeneratorSpec::Mc { spec, formulation },
    };
    let loaded = generator.materialize().map_err(Failure::config)?;
    let file = ProblemFile::Generated { generator };
    let json = file.to_json().map_err(Failure::config)?;
    let summary = format!(
        "dimension {}, observations {}",
        loaded.problem.map.input_dim(),
        loaded.problem.map.output_dim()
    );
    match path {
        Some(p) => {
            fs::write(p, json + "\n").map_err(|e| Failure::config(e.into()))?;
            let _ = writeln!(out, "wrote {}: {summary}", p.display());
        }
        None => {
            let _ = writeln!(out, "{json}");
        }
    }
    Ok(())
}

/// Slack applied to the certificate checks.
pub const CHECK_SLACK: f64 = 1e-9;

pub fn check(cfg: &RunConfig, force_reference: bool, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<(), Failure> {
    let loaded = load(cfg)?;
    let problem = &loaded.problem;
    let config = cfg.solver_config();
    let reference = resolve_reference(cfg, problem, force_reference)?;

    match &reference {
        Some(Reference { computed: Some(r), .. }) => {
            let method = match r.method {
                crate::harness::ReferenceMethod::ClosedForm => "closed-form",
                crate::harness::ReferenceMethod::LongRun => "long-run",
            };
            let _ = writeln!(
                out,
                "reference: {method} f* = {} (accuracy {}{})",
                format_float(r.f_star),
                format_float(r.accuracy),
                if r.converged { "" } else { ", not reached" }
            );
        }
        Some(r) => {
            let _ = writeln!(out, "reference: given f* = {}", format_float(r.f_star));
        }
        None => {
            let _ = writeln!(out, "reference: unavailable");
        }
    }

    let kinds: Vec<SolverKind> = cfg
        .solvers
        .iter()
        .copied()
        .filter(|k| matches!(k, SolverKind::UniPd | SolverKind::AccUniPd))
        .collect();
    for k in cfg.solvers.iter().filter(|k| !kinds.contains(k)) {
        let _ = writeln!(out, "{}: no certificate (skipped)", k.name());
    }
    let model = HolderModel::derive(problem, &config.spectral).map_err(Failure::solver)?;
    let results = run_solvers(problem, cfg, &kinds);

    let _ = writeln!(
        out,
        "solver\titerations\tavg_queries\tm_bar\tmax_violation\tworst_k\tweighted_violation\tstatus"
    );
    let lambda0 = config.lambda0.clone().unwrap_or_else(|| Vector::zeros(problem.map.output_dim()));
    let mut first_failure = None;
    for (kind, result) in results {
        let output = match result {
            Ok(o) => o,
            Err(e) => {
                let _ = writeln!(err, "{}: {e}", kind.name());
                let _ = writeln!(out, "{}\t-\t-\t-\t-\t-\t-\tfailed", kind.name());
                first_failure.get_or_insert(e);
                continue;
            }
        };
        let trace = &output.trace;
        let iterations = trace.records.len();
        let avg = trace.last().map_or(0.0, |r| r.queries as f64 / iterations as f64);
        let (m_bar, nu, m_note) = match model {
            Some(m) => (m.m_bar(config.epsilon), m.nu, ""),
            None => {
                // Backtracking keeps M_k ≤ 2·M̄_ε, so half the largest accepted
                // estimate is a lower estimate of M̄_ε.
                let max_m = trace.records.iter().map(|r| r.m).fold(0.0, f64::max);
                (0.5 * max_m, 0.0, " (estimated)")
            }
        };
        let mut row = vec![
            kind.name().to_string(),
            iterations.to_string(),
            format!("{avg:.4}"),
            format!("{}{m_note}", format_float(m_bar)),
        ];
        match &reference {
            Some(Reference { f_star, lambda_star: Some(ls), .. }) => {
                let which = if kind == SolverKind::UniPd { Certificate::Plain } else { Certificate::Accelerated };
                let report = theorem_bound_check(
                    trace,
                    &BoundInputs { f_star: *f_star, lambda_star: ls, lambda0: &lambda0, m_bar, nu, epsilon: config.epsilon },
                    which,
                );
                let status = if report.holds(CHECK_SLACK) {
                    "ok"
                } else if report.only_weighted_holds(CHECK_SLACK) {
                    "weighted-only"
                } else {
                    "violated"
                };
                row.extend([
                    format_float(report.max_violation.max(0.0)),
                    report.worst_k.map_or("-".into(), |k| k.to_string()),
                    format_float(report.max_violation_weighted.max(0.0)),
                    status.to_string(),
                ]);
            }
            _ => row.extend(["-".into(), "-".into(), "-".into(), "reference unavailable".into()]),
        }
        let _ = writeln!(out, "{}", row.join("\t"));
    }
    match first_failure {
        Some(e) => Err(Failure::solver(e)),
        None => Ok(()),
    }
}
