//! Instance generators, data loading, metrics and reference solutions.

pub mod mc;
pub mod qt;
pub mod reference;

pub use mc::{gen_mc, load_ratings, sample_count, Entry, McFormulation, McInstance, McSpec};
pub use qt::{default_measurements, gen_qt, QtInstance, QtSpec};
pub use reference::{reference_solve, ReferenceMethod, ReferenceSolution};

use crate::error::{Error, Result};
use crate::linop::Matrix;

/// Root mean squared deviation of `x` on the held-out entries.
pub fn rmse(x: &Matrix, test: &[Entry]) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::InvalidArgument("rmse needs a nonempty test set".into()));
    }
    let sum: f64 = test
        .iter()
        .map(|e| {
            let d = x[(e.row, e.col)] - e.value;
            d * d
        })
        .sum();
    Ok((sum / test.len() as f64).sqrt())
}
