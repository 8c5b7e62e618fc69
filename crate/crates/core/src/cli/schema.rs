//! JSON problem files.
//!
//! A problem file is either explicit,
//!
//! ```json
//! {"type": "explicit",
//!  "objective": {"kind": "separable-quadratic", "center": [0.0]},
//!  "domain": {"kind": "whole-space", "dim": 1},
//!  "constraint": {"kind": "zero-point"},
//!  "operator": {"kind": "dense", "rows": 1, "cols": 1, "data": [1.0]},
//!  "offset": [1.0]}
//! ```
//!
//! or a generator spec that is materialized on load,
//!
//! ```json
//! {"type": "generated", "generator": {"kind": "qt", "qubits": 2, "seed": 7}}
//! ```
//!
//! Dense data and matrix-valued variables are row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{gen_mc, gen_qt, McFormulation, McInstance, McSpec, QtSpec};
use crate::linop::{Generator, LinearMap, Matrix, PauliEnsemble, PauliRow, SparseMatrix, Vector};
use crate::problem::{ConstraintSet, Domain, Objective, Problem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Zero,
    QuadraticSlack,
    SquaredNuclear { scale: f64, rows: usize, cols: usize },
    SeparableQuadratic { center: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    WholeSpace { dim: usize },
    L1Ball { dim: usize, radius: f64 },
    L2Ball { dim: usize, radius: f64 },
    NuclearBall { rows: usize, cols: usize, radius: f64 },
    Spectrahedron { side: usize },
    Simplex { dim: usize },
    Singleton { point: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ConstraintSpec {
    ZeroPoint,
    L2Ball { radius: f64 },
    L1Ball { radius: f64 },
    NonnegativeOrthant,
    PsdCone,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OperatorSpec {
    Identity { dim: usize },
    Dense { rows: usize, cols: usize, data: Vec<f64> },
    Sparse { rows: usize, cols: usize, triplets: Vec<(usize, usize, f64)> },
    Sampling { input_dim: usize, indices: Vec<usize> },
    /// Rows are generator strings such as `"XZ"` over `I, X, Z, W`.
    Pauli { qubits: usize, rows: Vec<String> },
    Compose { outer: Box<OperatorSpec>, inner: Box<OperatorSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Qt(QtSpec),
    Mc {
        #[serde(flatten)]
        spec: McSpec,
        formulation: McFormulation,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ProblemFile {
    Explicit {
        objective: ObjectiveSpec,
        domain: DomainSpec,
        constraint: ConstraintSpec,
        operator: OperatorSpec,
        offset: Vec<f64>,
    },
    Generated { generator: GeneratorSpec },
}

/// A materialized problem together with the completion instance it came from.
#[derive(Clone, Debug)]
pub struct LoadedProblem {
    pub problem: Problem,
    pub completion: Option<McInstance>,
}

impl ObjectiveSpec {
    pub fn build(&self) -> Objective {
        match self {
            ObjectiveSpec::Zero => Objective::Zero,
            ObjectiveSpec::QuadraticSlack => Objective::QuadraticSlack,
            ObjectiveSpec::SquaredNuclear { scale, rows, cols } => Objective::SquaredNuclear {
                scale: *scale,
                rows: *rows,
                cols: *cols,
            },
            ObjectiveSpec::SeparableQuadratic { center } => Objective::SeparableQuadratic {
                center: Vector::from_vec(center.clone()),
            },
        }
    }
}

impl DomainSpec {
    pub fn build(&self) -> Domain {
        match self {
            DomainSpec::WholeSpace { dim } => Domain::WholeSpace { dim: *dim },
            DomainSpec::L1Ball { dim, radius } => Domain::L1Ball { dim: *dim, radius: *radius },
            DomainSpec::L2Ball { dim, radius } => Domain::L2Ball { dim: *dim, radius: *radius },
            DomainSpec::NuclearBall { rows, cols, radius } => Domain::NuclearBall {
                rows: *rows,
                cols: *cols,
                radius: *radius,
            },
            DomainSpec::Spectrahedron { side } => Domain::Spectrahedron { side: *side },
            DomainSpec::Simplex { dim } => Domain::Simplex { dim: *dim },
            DomainSpec::Singleton { point } => Domain::Singleton {
                point: Vector::from_vec(point.clone()),
            },
        }
    }
}

impl ConstraintSpec {
    pub fn build(&self) -> ConstraintSet {
        match self {
            ConstraintSpec::ZeroPoint => ConstraintSet::ZeroPoint,
            ConstraintSpec::L2Ball { radius } => ConstraintSet::L2Ball { radius: *radius },
            ConstraintSpec::L1Ball { radius } => ConstraintSet::L1Ball { radius: *radius },
            ConstraintSpec::NonnegativeOrthant => ConstraintSet::NonnegativeOrthant,
            ConstraintSpec::PsdCone => ConstraintSet::PsdCone,
        }
    }
}

fn pauli_row(label: &str, qubits: usize) -> Result<PauliRow> {
    let gens = label
        .chars()
        .map(|c| Generator::from_symbol(c).ok_or_else(|| Error::Config(format!("unknown generator {c:?} in {label:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if gens.len() != qubits {
        return Err(Error::Config(format!("row {label:?} has {} generators, expected {qubits}", gens.len())));
    }
    Ok(PauliRow::new(gens))
}

impl OperatorSpec {
    pub fn build(&self) -> Result<LinearMap> {
        Ok(match self {
            OperatorSpec::Identity { dim } => LinearMap::identity(*dim),
            OperatorSpec::Dense { rows, cols, data } => {
                if data.len() != rows * cols {
                    return Err(Error::Config(format!(
                        "dense operator has {} entries, expected {rows}x{cols}",
                        data.len()
                    )));
                }
                LinearMap::Dense(Matrix::from_row_slice(*rows, *cols, data))
            }
            OperatorSpec::Sparse { rows, cols, triplets } => {
                LinearMap::Sparse(SparseMatrix::from_triplets(*rows, *cols, triplets)?)
            }
            OperatorSpec::Sampling { input_dim, indices } => LinearMap::sampling(*input_dim, indices.clone())?,
            OperatorSpec::Pauli { qubits, rows } => {
                let rows = rows.iter().map(|r| pauli_row(r, *qubits)).collect::<Result<Vec<_>>>()?;
                LinearMap::Pauli(PauliEnsemble::new(*qubits, rows)?)
            }
            OperatorSpec::Compose { outer, inner } => LinearMap::compose(outer.build()?, inner.build()?)?,
        })
    }
}

impl GeneratorSpec {
    pub fn materialize(&self) -> Result<LoadedProblem> {
        match self {
            GeneratorSpec::Qt(spec) => Ok(LoadedProblem {
                problem: gen_qt(spec)?.problem()?,
                completion: None,
            }),
            GeneratorSpec::Mc { spec, formulation } => {
                let inst = gen_mc(spec)?;
                Ok(LoadedProblem {
                    problem: inst.problem(formulation)?,
                    completion: Some(inst),
                })
            }
        }
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(&self) -> Result<LoadedProblem> {
        match self {
            ProblemFile::Explicit {
                objective,
                domain,
                constraint,
                operator,
                offset,
            } => Ok(LoadedProblem {
                problem: Problem::new(
                    objective.build(),
                    operator.build()?,
                    Vector::from_vec(offset.clone()),
                    domain.build(),
                    constraint.build(),
                )?,
                completion: None,
            }),
            ProblemFile::Generated { generator } => generator.materialize(),
        }
    }
}
