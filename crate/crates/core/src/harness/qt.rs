//! Synthetic tomography-style instances: a random pure state observed through
//! normalized tensor-product measurements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linop::{random_unit, Generator, LinearMap, PauliEnsemble, PauliRow, Vector};
use crate::problem::{flatten, ConstraintSet, Domain, Objective, Problem};

pub const MAX_QUBITS: usize = 8;

/// Generator parameters; `measurements = None` uses [`default_measurements`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QtSpec {
    pub qubits: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurements: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QtInstance {
    pub spec: QtSpec,
    /// Unit state vector `v`; the ground truth is `vvᵀ`.
    pub state: Vector,
    /// Flattened `p x p` ground truth.
    pub truth: Vector,
    pub ensemble: PauliEnsemble,
    pub observations: Vector,
}

/// `⌊2p ln p⌋` with `p = 2^qubits`.
pub fn default_measurements(qubits: usize) -> usize {
    let p = (1usize << qubits) as f64;
    (2.0 * p * p.ln()).floor() as usize
}

/// Draws one row with i.i.d. uniform generators, redrawing until the product
/// is symmetric (an even number of `W` factors). Antisymmetric rows vanish on
/// every symmetric matrix and would only add zero measurements.
fn draw_row(qubits: usize, rng: &mut ChaCha8Rng) -> PauliRow {
    loop {
        let gens: Vec<Generator> = (0..qubits)
            .map(|_| Generator::ALL[rng.random_range(0..4)])
            .collect();
        let row = PauliRow::new(gens);
        if row.is_symmetric() {
            return row;
        }
    }
}

pub fn gen_qt(spec: &QtSpec) -> Result<QtInstance> {
    if spec.qubits == 0 || spec.qubits > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "qubits must lie in 1..={MAX_QUBITS}, got {}",
            spec.qubits
        )));
    }
    let n = spec.measurements.unwrap_or_else(|| default_measurements(spec.qubits));
    if n == 0 {
        return Err(Error::InvalidArgument("at least one measurement is required".into()));
    }
    let p = 1usize << spec.qubits;
    let state = random_unit(p, spec.seed);
    let truth = flatten(&(&state * state.transpose()));

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(1));
    let rows = (0..n).map(|_| draw_row(spec.qubits, &mut rng)).collect();
    let ensemble = PauliEnsemble::new(spec.qubits, rows)?;
    let observations = LinearMap::Pauli(ensemble.clone()).apply(&truth)?;
    Ok(QtInstance {
        spec: spec.clone(),
        state,
        truth,
        ensemble,
        observations,
    })
}

impl QtInstance {
    pub fn side(&self) -> usize {
        self.ensemble.side()
    }

    pub fn map(&self) -> LinearMap {
        LinearMap::Pauli(self.ensemble.clone())
    }

    /// `min ½‖A(X) - b‖²` over the spectrahedron.
    pub fn problem(&self) -> Result<Problem> {
        Problem::new(
            Objective::QuadraticSlack,
            self.map(),
            self.observations.clone(),
            Domain::Spectrahedron { side: self.side() },
            ConstraintSet::ZeroPoint,
        )
    }
}
