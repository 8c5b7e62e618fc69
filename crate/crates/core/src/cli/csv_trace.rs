//! CSV export of solver traces.
//!
//! Columns: `k,M_k,i_k,obj,obj_residual,feas,g_value,queries,elapsed_s`.
//! `obj_residual = obj - f*` is present only when a reference value is known.
//! Frank-Wolfe rows report `M_k = i_k = 0`, `feas = 0` and the duality gap in
//! `g_value`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::solvers::Trace;

pub const HEADER: [&str; 9] = ["k", "M_k", "i_k", "obj", "obj_residual", "feas", "g_value", "queries", "elapsed_s"];

/// Shortest round-trip representation, switching to exponent form outside
/// `[1e-4, 1e15)`.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

pub fn write_trace<W: Write>(out: W, trace: &Trace, f_star: Option<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = HEADER
        .iter()
        .copied()
        .filter(|h| f_star.is_some() || *h != "obj_residual")
        .collect();
    w.write_record(&header).map_err(csv_error)?;
    for r in &trace.records {
        let mut row = vec![
            r.k.to_string(),
            format_float(r.m),
            r.i.to_string(),
            format_float(r.objective),
        ];
        if let Some(f) = f_star {
            row.push(format_float(r.objective - f));
        }
        row.extend([
            format_float(r.feasibility),
            format_float(r.g_value),
            r.queries.to_string(),
            format_float(r.elapsed),
        ]);
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
