//! Hölder smoothness models of the dual and the complexity estimates built on
//! them.

use crate::error::{Error, Result};
use crate::oracles::SpectralOptions;
use crate::problem::{Domain, Objective, Problem};

/// `M̄_ε = [(1-ν)/(1+ν) · 1/ε]^{(1-ν)/(1+ν)} · M_ν^{2/(1+ν)}`.
pub fn m_bar_eps(nu: f64, m_nu: f64, eps: f64) -> f64 {
    let e = (1.0 - nu) / (1.0 + nu);
    // At ν = 1 the bracket is 0 and powf(0, 0) = 1.
    ((1.0 - nu) / (1.0 + nu) / eps).powf(e) * m_nu.powf(2.0 / (1.0 + nu))
}

/// Worst-case iteration counts of the plain and the accelerated method.
pub fn complexity_bounds(nu: f64, m_nu: f64, eps: f64, lambda_star_norm: f64) -> (u64, u64) {
    let l = lambda_star_norm;
    // [c·‖λ*‖ / (-1 + sqrt(1 + 8‖λ*‖/max(‖λ*‖, 1)))], extended continuously
    // to ‖λ*‖ = 0 where it tends to c/4.
    let ratio = |c: f64| {
        let denom = -1.0 + (1.0 + 8.0 * l / l.max(1.0)).sqrt();
        if denom > 0.0 {
            c * l / denom
        } else {
            c / 4.0
        }
    };
    let s2 = 2f64.sqrt();
    let k1 = ratio(4.0 * s2).powi(2) * (m_nu / eps).powf(2.0 / (1.0 + nu));
    let k2 = ratio(8.0 * s2).powf((2.0 + 2.0 * nu) / (1.0 + 3.0 * nu))
        * (m_nu / eps).powf(2.0 / (1.0 + 3.0 * nu));
    (k1.floor() as u64, k2.floor() as u64)
}

/// A Hölder model `(ν, M_ν)` of the gradient of `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderModel {
    pub nu: f64,
    pub m_nu: f64,
}

impl HolderModel {
    pub fn new(nu: f64, m_nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::InvalidArgument(format!("Hölder order must lie in [0, 1], got {nu}")));
        }
        if !(m_nu > 0.0 && m_nu.is_finite()) {
            return Err(Error::InvalidArgument(format!("Hölder constant must be positive, got {m_nu}")));
        }
        Ok(Self { nu, m_nu })
    }

    /// Uniformly convex `f` of degree `q ≥ 2` with modulus `μ`:
    /// `ν = 1/(q-1)`, `M_ν = (‖A‖²/μ)^{1/(q-1)}`.
    pub fn uniformly_convex(norm_a: f64, mu: f64, q: f64) -> Result<Self> {
        if !(q >= 2.0) || !(mu > 0.0) {
            return Err(Error::InvalidArgument(format!("need q ≥ 2 and μ > 0, got q = {q}, μ = {mu}")));
        }
        Self::new(1.0 / (q - 1.0), (norm_a * norm_a / mu).powf(1.0 / (q - 1.0)))
    }

    /// Bounded domain with `sup_{x∈X} ‖Ax‖ ≤ diameter`: `ν = 0`, `M₀ = 2·diameter`.
    pub fn bounded_domain(diameter: f64) -> Result<Self> {
        Self::new(0.0, 2.0 * diameter)
    }

    pub fn m_bar(&self, eps: f64) -> f64 {
        m_bar_eps(self.nu, self.m_nu, eps)
    }

    /// Model derivable from the problem structure alone, if any.
    pub fn derive(problem: &Problem, opts: &SpectralOptions) -> Result<Option<Self>> {
        let norm_a = || problem.map.norm_estimate(1e-10, opts.seed);
        match &problem.objective {
            Objective::SeparableQuadratic { .. } => Ok(Some(Self::uniformly_convex(norm_a()?, 1.0, 2.0)?)),
            Objective::Zero => {
                let radius = match &problem.domain {
                    Domain::WholeSpace { .. } => return Ok(None),
                    Domain::L1Ball { radius, .. }
                    | Domain::L2Ball { radius, .. }
                    | Domain::NuclearBall { radius, .. } => *radius,
                    Domain::Spectrahedron { .. } | Domain::Simplex { .. } => 1.0,
                    Domain::Singleton { point } => point.norm(),
                };
                let d = norm_a()? * radius;
                if d > 0.0 {
                    Ok(Some(Self::bounded_domain(d)?))
                } else {
                    Ok(None)
                }
            }
            Objective::QuadraticSlack | Objective::SquaredNuclear { .. } => Ok(None),
        }
    }
}
