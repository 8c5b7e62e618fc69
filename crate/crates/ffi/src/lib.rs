//! C ABI for the unipd solvers.
//!
//! Problems are loaded from the JSON problem-file format and solved into
//! opaque result handles. Every fallible call returns a [`UnipdStatus`]; the
//! message of the last failure on the calling thread is available from
//! [`unipd_last_error_message`]. Handles must be released with their `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use unipd::cli::ProblemFile;
use unipd::problem::Problem;
use unipd::solvers::{SolverConfig, SolverKind, SolverOutput, Termination};
use unipd::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnipdStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    Parse = 3,
    Unsupported = 4,
    SolverFailure = 5,
    Io = 6,
    BufferSize = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnipdSolver {
    Unipd = 0,
    AccUnipd = 1,
    FwHarmonic = 2,
    FwLinesearch = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnipdTermination {
    MaxIterations = 0,
    PracticalStop = 1,
    StationaryDual = 2,
}

/// Solver settings; obtain defaults from [`unipd_default_options`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnipdOptions {
    pub solver: UnipdSolver,
    pub epsilon: f64,
    /// Initial smoothness estimate; `<= 0` probes it.
    pub m_init: f64,
    pub k_max: usize,
    pub i_max: usize,
    /// Nonzero enables the practical stopping rule.
    pub practical_stop: i32,
    pub spectral_tol: f64,
    pub seed: u64,
}

/// One row of a trace.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnipdRecord {
    pub k: usize,
    pub m: f64,
    pub i: usize,
    pub objective: f64,
    pub feasibility: f64,
    pub g_value: f64,
    pub queries: usize,
}

/// Opaque problem handle.
pub struct UnipdProblem {
    inner: Problem,
}

/// Opaque solver result handle.
pub struct UnipdResult {
    inner: SolverOutput,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> UnipdStatus {
    match e {
        Error::Dimension { .. } | Error::InvalidArgument(_) | Error::Config(_) => UnipdStatus::InvalidArgument,
        Error::Parse { .. } | Error::Json(_) => UnipdStatus::Parse,
        Error::Unsupported(_) => UnipdStatus::Unsupported,
        Error::Convergence { .. } | Error::LineSearch { .. } => UnipdStatus::SolverFailure,
        Error::Io(_) => UnipdStatus::Io,
    }
}

fn fail(status: UnipdStatus, message: impl Into<String>) -> UnipdStatus {
    set_error(message.into());
    status
}

/// Runs `body`, converting errors and panics into status codes.
fn guarded(body: impl FnOnce() -> Result<(), UnipdStatus>) -> UnipdStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => UnipdStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(UnipdStatus::Panic, "internal panic"),
    }
}

fn lift(e: Error) -> UnipdStatus {
    fail(status_of(&e), e.to_string())
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn unipd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn unipd_default_options() -> UnipdOptions {
    let d = SolverConfig::default();
    UnipdOptions {
        solver: UnipdSolver::AccUnipd,
        epsilon: d.epsilon,
        m_init: 0.0,
        k_max: d.k_max,
        i_max: d.i_max,
        practical_stop: d.practical_stop as i32,
        spectral_tol: d.spectral.tol,
        seed: d.seed,
    }
}

/// Parses a JSON problem file (explicit or generated) into `*out`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unipd_problem_from_json(json: *const c_char, out: *mut *mut UnipdProblem) -> UnipdStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return Err(fail(UnipdStatus::NullArgument, "null argument"));
        }
        // SAFETY: checked non-null; the caller guarantees nul termination.
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|_| fail(UnipdStatus::Parse, "problem JSON is not UTF-8"))?;
        let problem = ProblemFile::from_json(text).and_then(|f| f.load()).map_err(lift)?.problem;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(UnipdProblem { inner: problem })) };
        Ok(())
    })
}

/// Dimension of the primal variable, 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn unipd_problem_primal_dim(problem: *const UnipdProblem) -> usize {
    // SAFETY: the caller guarantees the handle is live.
    unsafe { problem.as_ref() }.map_or(0, |p| p.inner.map.input_dim())
}

/// Dimension of the multiplier, 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn unipd_problem_dual_dim(problem: *const UnipdProblem) -> usize {
    // SAFETY: the caller guarantees the handle is live.
    unsafe { problem.as_ref() }.map_or(0, |p| p.inner.map.output_dim())
}

/// # Safety
/// `problem` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn unipd_problem_free(problem: *mut UnipdProblem) {
    if !problem.is_null() {
        // SAFETY: created by Box::into_raw in unipd_problem_from_json.
        drop(unsafe { Box::from_raw(problem) });
    }
}

fn kind_of(s: UnipdSolver) -> SolverKind {
    match s {
        UnipdSolver::Unipd => SolverKind::UniPd,
        UnipdSolver::AccUnipd => SolverKind::AccUniPd,
        UnipdSolver::FwHarmonic => SolverKind::FwHarmonic,
        UnipdSolver::FwLinesearch => SolverKind::FwLineSearch,
    }
}

/// Runs the selected solver; `options` may be null for the defaults.
///
/// # Safety
/// `problem` must be a live handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn unipd_solve(
    problem: *const UnipdProblem,
    options: *const UnipdOptions,
    out: *mut *mut UnipdResult,
) -> UnipdStatus {
    guarded(|| {
        // SAFETY: the caller guarantees validity of non-null pointers.
        let (problem, opts) = unsafe { (problem.as_ref(), options.as_ref()) };
        let problem = problem.ok_or_else(|| fail(UnipdStatus::NullArgument, "null problem"))?;
        if out.is_null() {
            return Err(fail(UnipdStatus::NullArgument, "null output pointer"));
        }
        let opts = opts.copied().unwrap_or_else(|| unipd_default_options());
        let mut config = SolverConfig {
            epsilon: opts.epsilon,
            m_init: (opts.m_init > 0.0).then_some(opts.m_init),
            k_max: opts.k_max,
            i_max: opts.i_max,
            practical_stop: opts.practical_stop != 0,
            seed: opts.seed,
            ..SolverConfig::default()
        };
        config.spectral.tol = opts.spectral_tol;
        config.spectral.seed = opts.seed;
        let output = kind_of(opts.solver).solve(&problem.inner, &config).map_err(lift)?;
        // SAFETY: checked non-null.
        unsafe { *out = Box::into_raw(Box::new(UnipdResult { inner: output })) };
        Ok(())
    })
}

/// Number of recorded iterations, 0 for a null handle.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn unipd_result_iterations(result: *const UnipdResult) -> usize {
    // SAFETY: the caller guarantees the handle is live.
    unsafe { result.as_ref() }.map_or(0, |r| r.inner.trace.records.len())
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn unipd_result_termination(result: *const UnipdResult) -> UnipdTermination {
    // SAFETY: the caller guarantees the handle is live.
    match unsafe { result.as_ref() }.map(|r| r.inner.trace.termination) {
        Some(Termination::PracticalStop) => UnipdTermination::PracticalStop,
        Some(Termination::StationaryDual) => UnipdTermination::StationaryDual,
        _ => UnipdTermination::MaxIterations,
    }
}

/// Copies trace row `k` into `*out`.
///
/// # Safety
/// `result` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn unipd_result_record(result: *const UnipdResult, k: usize, out: *mut UnipdRecord) -> UnipdStatus {
    guarded(|| {
        // SAFETY: the caller guarantees validity of non-null pointers.
        let result = unsafe { result.as_ref() }.ok_or_else(|| fail(UnipdStatus::NullArgument, "null result"))?;
        if out.is_null() {
            return Err(fail(UnipdStatus::NullArgument, "null output pointer"));
        }
        let r = result
            .inner
            .trace
            .records
            .get(k)
            .ok_or_else(|| fail(UnipdStatus::InvalidArgument, format!("no record {k}")))?;
        // SAFETY: checked non-null.
        unsafe {
            *out = UnipdRecord {
                k: r.k,
                m: r.m,
                i: r.i,
                objective: r.objective,
                feasibility: r.feasibility,
                g_value: r.g_value,
                queries: r.queries,
            }
        };
        Ok(())
    })
}

fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), UnipdStatus> {
    if buf.is_null() {
        return Err(fail(UnipdStatus::NullArgument, "null buffer"));
    }
    if len != src.len() {
        return Err(fail(
            UnipdStatus::BufferSize,
            format!("buffer holds {len} values, need {}", src.len()),
        ));
    }
    // SAFETY: the caller guarantees `buf` holds `len` values.
    unsafe { ptr::copy_nonoverlapping(src.as_ptr(), buf, len) };
    Ok(())
}

/// Copies the averaged primal point; `len` must equal the primal dimension.
///
/// # Safety
/// `result` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn unipd_result_primal(result: *const UnipdResult, buf: *mut f64, len: usize) -> UnipdStatus {
    guarded(|| {
        // SAFETY: the caller guarantees the handle is live.
        let result = unsafe { result.as_ref() }.ok_or_else(|| fail(UnipdStatus::NullArgument, "null result"))?;
        copy_out(result.inner.primal.x.as_slice(), buf, len)
    })
}

/// Copies the final multiplier; `len` must equal the dual dimension.
///
/// # Safety
/// `result` must be a live handle and `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn unipd_result_dual(result: *const UnipdResult, buf: *mut f64, len: usize) -> UnipdStatus {
    guarded(|| {
        // SAFETY: the caller guarantees the handle is live.
        let result = unsafe { result.as_ref() }.ok_or_else(|| fail(UnipdStatus::NullArgument, "null result"))?;
        copy_out(result.inner.lambda.as_slice(), buf, len)
    })
}

/// # Safety
/// `result` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn unipd_result_free(result: *mut UnipdResult) {
    if !result.is_null() {
        // SAFETY: created by Box::into_raw in unipd_solve.
        drop(unsafe { Box::from_raw(result) });
    }
}
