//! Problem instances `min f(x) s.t. Ax - b ∈ K, x ∈ X`.

use crate::error::{Error, Result};
use crate::linop::{LinearMap, Matrix, Vector};
use crate::oracles::prox;

/// The objective `f`.
#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    Zero,
    /// `½‖r‖²` on a slack block `r = Ax - b`, i.e. least squares over `X`.
    /// The dual of this kind is handled in slack-eliminated form.
    QuadraticSlack,
    /// `(1/scale)·‖X‖_*²` on `rows x cols` matrices.
    SquaredNuclear { scale: f64, rows: usize, cols: usize },
    /// `½‖x - center‖²`.
    SeparableQuadratic { center: Vector },
}

/// The domain `X`.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    WholeSpace { dim: usize },
    L1Ball { dim: usize, radius: f64 },
    L2Ball { dim: usize, radius: f64 },
    NuclearBall { rows: usize, cols: usize, radius: f64 },
    /// Symmetric PSD `side x side` matrices with unit trace.
    Spectrahedron { side: usize },
    Simplex { dim: usize },
    Singleton { point: Vector },
}

/// The constraint set `K`.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstraintSet {
    ZeroPoint,
    L2Ball { radius: f64 },
    L1Ball { radius: f64 },
    NonnegativeOrthant,
    /// Symmetric PSD matrices; the residual is read as a square matrix.
    PsdCone,
}

/// Membership slack used by the `contains` tests.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::WholeSpace { dim }
            | Domain::L1Ball { dim, .. }
            | Domain::L2Ball { dim, .. }
            | Domain::Simplex { dim } => *dim,
            Domain::NuclearBall { rows, cols, .. } => rows * cols,
            Domain::Spectrahedron { side } => side * side,
            Domain::Singleton { point } => point.len(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Domain::WholeSpace { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let radius = match self {
            Domain::L1Ball { radius, .. }
            | Domain::L2Ball { radius, .. }
            | Domain::NuclearBall { radius, .. } => Some(*radius),
            _ => None,
        };
        if let Some(r) = radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidArgument(format!("ball radius must be positive, got {r}")));
            }
        }
        if self.dim() == 0 {
            return Err(Error::InvalidArgument("domain has zero dimension".into()));
        }
        Ok(())
    }

    /// Membership test with slack `tol` (relative where a scale exists).
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            Domain::WholeSpace { .. } => true,
            Domain::L1Ball { radius, .. } => x.lp_norm(1) <= radius * (1.0 + tol) + tol,
            Domain::L2Ball { radius, .. } => x.norm() <= radius * (1.0 + tol) + tol,
            Domain::NuclearBall { rows, cols, radius } => {
                nuclear_norm(&reshape(x, *rows, *cols)) <= radius * (1.0 + tol) + tol
            }
            Domain::Spectrahedron { side } => {
                let m = reshape(x, *side, *side);
                let asym = (&m - m.transpose()).norm();
                let trace = m.trace();
                let min_eig = symmetric_part(&m).symmetric_eigen().eigenvalues.min();
                asym <= tol && (trace - 1.0).abs() <= tol && min_eig >= -tol
            }
            Domain::Simplex { .. } => {
                x.iter().all(|&v| v >= -tol) && (x.sum() - 1.0).abs() <= tol * x.len().max(1) as f64
            }
            Domain::Singleton { point } => (x - point).norm() <= tol * point.norm().max(1.0),
        }
    }
}

impl ConstraintSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            ConstraintSet::L1Ball { radius } | ConstraintSet::L2Ball { radius } => {
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "constraint radius must be nonnegative, got {radius}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// A primal point: the decision variable and, for slack formulations, the
/// slack block.
#[derive(Clone, Debug, PartialEq)]
pub struct Primal {
    pub x: Vector,
    pub slack: Option<Vector>,
}

impl Primal {
    pub fn zeros(problem: &Problem) -> Self {
        Self {
            x: Vector::zeros(problem.map.input_dim()),
            slack: problem.has_slack().then(|| Vector::zeros(problem.map.output_dim())),
        }
    }

    /// `self ← (1 - γ)·self + γ·other`.
    pub fn blend(&mut self, other: &Primal, gamma: f64) {
        self.x.axpy(gamma, &other.x, 1.0 - gamma);
        if let (Some(s), Some(o)) = (self.slack.as_mut(), other.slack.as_ref()) {
            s.axpy(gamma, o, 1.0 - gamma);
        }
    }
}

/// A full problem description.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub objective: Objective,
    pub map: LinearMap,
    pub offset: Vector,
    pub domain: Domain,
    pub constraint: ConstraintSet,
}

impl Problem {
    pub fn new(
        objective: Objective,
        map: LinearMap,
        offset: Vector,
        domain: Domain,
        constraint: ConstraintSet,
    ) -> Result<Self> {
        let problem = Self {
            objective,
            map,
            offset,
            domain,
            constraint,
        };
        problem.validate()?;
        Ok(problem)
    }

    pub fn validate(&self) -> Result<()> {
        let (n, p) = (self.map.output_dim(), self.map.input_dim());
        if n == 0 || p == 0 {
            return Err(Error::InvalidArgument("operator has a zero dimension".into()));
        }
        if self.offset.len() != n {
            return Err(Error::dim("offset b", n, self.offset.len()));
        }
        if self.domain.dim() != p {
            return Err(Error::dim("domain", p, self.domain.dim()));
        }
        self.domain.validate()?;
        self.constraint.validate()?;
        if let ConstraintSet::PsdCone = self.constraint {
            let side = (n as f64).sqrt().round() as usize;
            if side * side != n {
                return Err(Error::InvalidArgument(format!(
                    "psd-cone constraint needs a square residual, got length {n}"
                )));
            }
        }
        match &self.objective {
            Objective::Zero => {}
            Objective::QuadraticSlack => {
                if self.constraint != ConstraintSet::ZeroPoint {
                    return Err(Error::Unsupported(
                        "quadratic-slack objective requires the zero-point constraint".into(),
                    ));
                }
            }
            Objective::SquaredNuclear { scale, rows, cols } => {
                if rows * cols != p {
                    return Err(Error::dim("squared-nuclear shape", p, rows * cols));
                }
                if !(*scale > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "squared-nuclear scale must be positive, got {scale}"
                    )));
                }
            }
            Objective::SeparableQuadratic { center } => {
                if center.len() != p {
                    return Err(Error::dim("quadratic center", p, center.len()));
                }
            }
        }
        Ok(())
    }

    pub fn has_slack(&self) -> bool {
        self.objective == Objective::QuadraticSlack
    }

    /// `f` at a primal point.
    pub fn objective_value(&self, primal: &Primal) -> f64 {
        match &self.objective {
            Objective::Zero => 0.0,
            Objective::QuadraticSlack => match &primal.slack {
                Some(r) => 0.5 * r.norm_squared(),
                None => f64::NAN,
            },
            Objective::SquaredNuclear { scale, rows, cols } => {
                let nn = nuclear_norm(&reshape(&primal.x, *rows, *cols));
                nn * nn / scale
            }
            Objective::SeparableQuadratic { center } => 0.5 * (&primal.x - center).norm_squared(),
        }
    }

    /// `½‖Ax - b‖²`, the smooth objective of the least-squares kinds.
    pub fn least_squares_value(&self, x: &Vector) -> Result<f64> {
        Ok(0.5 * (self.map.apply(x)? - &self.offset).norm_squared())
    }

    /// `Ax - b`, minus the slack block when present.
    pub fn residual(&self, primal: &Primal) -> Result<Vector> {
        let mut u = self.map.apply(&primal.x)?;
        u -= &self.offset;
        if let Some(r) = &primal.slack {
            u -= r;
        }
        Ok(u)
    }

    /// `dist(Ax - b, K)` (slack-adjusted).
    pub fn feasibility(&self, primal: &Primal) -> Result<f64> {
        Ok(prox::dist_to_k(&self.residual(primal)?, &self.constraint))
    }
}

/// Row-major reshape of a flat vector.
pub fn reshape(x: &Vector, rows: usize, cols: usize) -> Matrix {
    Matrix::from_row_slice(rows, cols, x.as_slice())
}

/// Row-major flattening of a matrix.
pub fn flatten(m: &Matrix) -> Vector {
    let (rows, cols) = m.shape();
    Vector::from_iterator(rows * cols, (0..rows).flat_map(|i| (0..cols).map(move |j| m[(i, j)])))
}

pub fn symmetric_part(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

pub fn nuclear_norm(m: &Matrix) -> f64 {
    m.clone().svd(false, false).singular_values.sum()
}
