//! Support function `h` of the constraint set, its prox, projections and
//! distances.

use std::cmp::Ordering;

use crate::linop::{Matrix, Vector};
use crate::problem::{flatten, reshape, symmetric_part, ConstraintSet};

/// Euclidean projection onto `{x : ‖x‖₁ ≤ radius}` by sort-and-threshold.
pub fn project_l1_ball(v: &Vector, radius: f64) -> Vector {
    if v.lp_norm(1) <= radius {
        return v.clone();
    }
    if radius <= 0.0 {
        return Vector::zeros(v.len());
    }
    let abs = v.map(f64::abs);
    let theta = simplex_threshold(abs.as_slice(), radius);
    Vector::from_iterator(
        v.len(),
        v.iter().map(|&x| x.signum() * (x.abs() - theta).max(0.0)),
    )
}

/// Euclidean projection onto `{x ≥ 0 : Σx = total}`.
pub fn project_simplex(v: &Vector, total: f64) -> Vector {
    let theta = simplex_threshold(v.as_slice(), total);
    v.map(|x| (x - theta).max(0.0))
}

/// Threshold `θ` with `Σ max(v_i - θ, 0) = total`.
fn simplex_threshold(v: &[f64], total: f64) -> f64 {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - total) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    theta
}

fn square_side(len: usize) -> usize {
    let side = (len as f64).sqrt().round() as usize;
    assert_eq!(side * side, len, "psd-cone vectors must have square length");
    side
}

/// Splits a symmetric matrix into its positive and negative spectral parts.
fn spectral_parts(m: &Matrix) -> (Matrix, Matrix) {
    let eig = symmetric_part(m).symmetric_eigen();
    let pos = eig.eigenvalues.map(|x| x.max(0.0));
    let neg = eig.eigenvalues.map(|x| x.min(0.0));
    let q = &eig.eigenvectors;
    (
        q * Matrix::from_diagonal(&pos) * q.transpose(),
        q * Matrix::from_diagonal(&neg) * q.transpose(),
    )
}

fn largest_eigenvalue(u: &Vector) -> f64 {
    let side = square_side(u.len());
    symmetric_part(&reshape(u, side, side))
        .symmetric_eigen()
        .eigenvalues
        .max()
}

/// `h(λ) = max_{r∈K} ⟨λ, r⟩`; `+∞` outside the domain of a cone indicator.
pub fn eval_h(lambda: &Vector, k: &ConstraintSet) -> f64 {
    match k {
        ConstraintSet::ZeroPoint => 0.0,
        ConstraintSet::L2Ball { radius } => radius * lambda.norm(),
        ConstraintSet::L1Ball { radius } => radius * lambda.amax(),
        ConstraintSet::NonnegativeOrthant => {
            if lambda.iter().all(|&x| x <= 0.0) {
                0.0
            } else {
                f64::INFINITY
            }
        }
        ConstraintSet::PsdCone => {
            let side = square_side(lambda.len());
            let m = reshape(lambda, side, side);
            let asym = (&m - m.transpose()).amax();
            let tol = 1e-10 * lambda.amax().max(1.0);
            if asym <= tol && largest_eigenvalue(lambda) <= tol {
                0.0
            } else {
                f64::INFINITY
            }
        }
    }
}

/// `argmin_λ h(λ) + (1/2τ)‖λ - v‖²`.
pub fn prox_h(v: &Vector, tau: f64, k: &ConstraintSet) -> Vector {
    match k {
        ConstraintSet::ZeroPoint => v.clone(),
        ConstraintSet::L2Ball { radius } => {
            let n = v.norm();
            if n == 0.0 {
                return v.clone();
            }
            v * (1.0 - tau * radius / n).max(0.0)
        }
        ConstraintSet::L1Ball { radius } => v - project_l1_ball(v, tau * radius),
        ConstraintSet::NonnegativeOrthant => v.map(|x| x.min(0.0)),
        ConstraintSet::PsdCone => {
            let side = square_side(v.len());
            flatten(&spectral_parts(&reshape(v, side, side)).1)
        }
    }
}

/// Euclidean projection onto `K`.
pub fn project_k(u: &Vector, k: &ConstraintSet) -> Vector {
    match k {
        ConstraintSet::ZeroPoint => Vector::zeros(u.len()),
        ConstraintSet::L2Ball { radius } => {
            let n = u.norm();
            if n <= *radius {
                u.clone()
            } else {
                u * (radius / n)
            }
        }
        ConstraintSet::L1Ball { radius } => project_l1_ball(u, *radius),
        ConstraintSet::NonnegativeOrthant => u.map(|x| x.max(0.0)),
        ConstraintSet::PsdCone => {
            let side = square_side(u.len());
            flatten(&spectral_parts(&reshape(u, side, side)).0)
        }
    }
}

/// Euclidean distance from `u` to `K`.
pub fn dist_to_k(u: &Vector, k: &ConstraintSet) -> f64 {
    match k {
        ConstraintSet::ZeroPoint => u.norm(),
        ConstraintSet::L2Ball { radius } => (u.norm() - radius).max(0.0),
        ConstraintSet::NonnegativeOrthant => u.map(|x| x.min(0.0)).norm(),
        _ => (u - project_k(u, k)).norm(),
    }
}
