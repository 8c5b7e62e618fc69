//! Sharp-operators `argmax_{x∈X} ⟨s, x⟩ - f(x)`.

use crate::error::{Error, Result};
use crate::linop::{fix_sign, power_method, top_singular_triplet, Matrix, Vector};
use crate::oracles::prox::{project_l1_ball, project_simplex};
use crate::oracles::SpectralOptions;
use crate::problem::{flatten, nuclear_norm, reshape, symmetric_part, Domain, Objective};

#[derive(Clone, Debug, PartialEq)]
pub struct SharpResult {
    pub x_star: Vector,
    /// `⟨s, x_star⟩ - f(x_star)`, always evaluated at the returned point.
    pub support_value: f64,
}

fn objective_at(f: &Objective, x: &Vector) -> f64 {
    match f {
        Objective::Zero | Objective::QuadraticSlack => 0.0,
        Objective::SquaredNuclear { scale, rows, cols } => {
            let nn = nuclear_norm(&reshape(x, *rows, *cols));
            nn * nn / scale
        }
        Objective::SeparableQuadratic { center } => 0.5 * (x - center).norm_squared(),
    }
}

fn finish(s: &Vector, f: &Objective, x_star: Vector) -> SharpResult {
    let support_value = s.dot(&x_star) - objective_at(f, &x_star);
    SharpResult {
        x_star,
        support_value,
    }
}

/// Top eigenvector of the symmetric part of `s` read as a `side x side`
/// matrix; `e₁` when `s` vanishes.
/// Falls back to the dense eigensolver when power iteration runs out of
/// budget, which happens when the top eigenvalues nearly coincide.
fn top_eigvec(s: &Vector, side: usize, opts: &SpectralOptions) -> Result<Vector> {
    let m = unit_frobenius(symmetric_part(&reshape(s, side, side)));
    match power_method(&m, opts.tol, opts.budget(side), opts.seed) {
        Ok(res) => Ok(res.left),
        Err(Error::Convergence { .. }) => {
            let eig = m.symmetric_eigen();
            let top = eig.eigenvalues.imax();
            let mut v = eig.eigenvectors.column(top).into_owned();
            fix_sign(&mut v);
            Ok(v)
        }
        Err(e) => Err(e),
    }
}

/// Top singular pair `(u, v)` of `m`, with the same dense fallback as
/// [`top_eigvec`].
fn top_pair(m: &Matrix, opts: &SpectralOptions) -> Result<(Vector, Vector)> {
    let m = &unit_frobenius(m.clone());
    let (rows, cols) = m.shape();
    match top_singular_triplet(m, opts.tol, opts.budget(rows.min(cols)), opts.seed) {
        Ok(trip) => Ok((trip.left, trip.right)),
        Err(Error::Convergence { .. }) => {
            let svd = m.clone().svd(true, true);
            let top = svd.singular_values.imax();
            let mut u = svd.u.expect("left vectors requested").column(top).into_owned();
            let mut v = svd.v_t.expect("right vectors requested").row(top).transpose();
            let before = v.clone();
            fix_sign(&mut v);
            if v != before {
                u.neg_mut();
            }
            Ok((u, v))
        }
        Err(e) => Err(e),
    }
}

/// Singular vectors do not depend on scale, while the power-method stopping
/// rule is absolute below one; tiny dual iterates would otherwise accept any
/// vector.
fn unit_frobenius(m: Matrix) -> Matrix {
    let norm = m.norm();
    if norm > 0.0 {
        m / norm
    } else {
        m
    }
}

fn rank_one(u: &Vector, v: &Vector) -> Vector {
    flatten(&(u * v.transpose()))
}

fn project_onto(domain: &Domain, y: &Vector) -> Vector {
    match domain {
        Domain::WholeSpace { .. } => y.clone(),
        Domain::L1Ball { radius, .. } => project_l1_ball(y, *radius),
        Domain::L2Ball { radius, .. } => {
            let n = y.norm();
            if n <= *radius {
                y.clone()
            } else {
                y * (radius / n)
            }
        }
        Domain::NuclearBall { rows, cols, radius } => {
            let svd = reshape(y, *rows, *cols).svd(true, true);
            let sv = project_l1_ball(&svd.singular_values, *radius);
            let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
            flatten(&(u * Matrix::from_diagonal(&sv) * vt))
        }
        Domain::Spectrahedron { side } => {
            let eig = symmetric_part(&reshape(y, *side, *side)).symmetric_eigen();
            let w = project_simplex(&eig.eigenvalues, 1.0);
            let q = &eig.eigenvectors;
            flatten(&(q * Matrix::from_diagonal(&w) * q.transpose()))
        }
        Domain::Simplex { .. } => project_simplex(y, 1.0),
        Domain::Singleton { point } => point.clone(),
    }
}

/// Maximizer of `⟨s, x⟩ - f(x)` over `X`.
///
/// Linear objectives use the extreme point of the domain selected by `s`,
/// the separable quadratic reduces to a projection of `center + s`, and the
/// squared nuclear norm scales the top singular pair. Ties and `s = 0` resolve
/// deterministically.
pub fn sharp(s: &Vector, domain: &Domain, f: &Objective, opts: &SpectralOptions) -> Result<SharpResult> {
    if s.len() != domain.dim() {
        return Err(Error::dim("sharp", domain.dim(), s.len()));
    }
    if let Domain::Singleton { point } = domain {
        return Ok(finish(s, f, point.clone()));
    }
    match f {
        Objective::Zero | Objective::QuadraticSlack => linear_sharp(s, domain, opts),
        Objective::SeparableQuadratic { center } => {
            if center.len() != s.len() {
                return Err(Error::dim("sharp center", s.len(), center.len()));
            }
            Ok(finish(s, f, project_onto(domain, &(center + s))))
        }
        Objective::SquaredNuclear { scale, rows, cols } => {
            if !matches!(domain, Domain::WholeSpace { .. }) {
                return Err(Error::Unsupported(
                    "squared-nuclear objective is only supported on the whole space".into(),
                ));
            }
            let m = reshape(s, *rows, *cols);
            let (u, v) = top_pair(&m, opts)?;
            // Exact Rayleigh value of the returned pair keeps the support
            // value consistent with the point even for inexact spectra.
            let sigma = u.dot(&(&m * &v));
            let x = rank_one(&u, &v) * (0.5 * scale * sigma);
            Ok(finish(s, f, x))
        }
    }
}

fn linear_sharp(s: &Vector, domain: &Domain, opts: &SpectralOptions) -> Result<SharpResult> {
    let f = &Objective::Zero;
    let x = match domain {
        Domain::WholeSpace { dim } => {
            if s.iter().any(|&v| v != 0.0) {
                return Err(Error::Unsupported(
                    "linear objective over the whole space is unbounded".into(),
                ));
            }
            Vector::zeros(*dim)
        }
        Domain::L1Ball { dim, radius } => {
            let mut x = Vector::zeros(*dim);
            let i = s.iamax();
            if s[i] != 0.0 {
                x[i] = radius * s[i].signum();
            }
            x
        }
        Domain::L2Ball { dim, radius } => {
            let n = s.norm();
            if n == 0.0 {
                Vector::zeros(*dim)
            } else {
                s * (radius / n)
            }
        }
        Domain::NuclearBall { rows, cols, radius } => {
            if s.iter().all(|&v| v == 0.0) {
                Vector::zeros(rows * cols)
            } else {
                let m = reshape(s, *rows, *cols);
                let (u, v) = top_pair(&m, opts)?;
                rank_one(&u, &v) * *radius
            }
        }
        Domain::Spectrahedron { side } => {
            let v = top_eigvec(s, *side, opts)?;
            rank_one(&v, &v)
        }
        Domain::Simplex { dim } => {
            let mut x = Vector::zeros(*dim);
            let mut best = 0usize;
            for i in 1..s.len() {
                if s[i] > s[best] {
                    best = i;
                }
            }
            x[best] = 1.0;
            x
        }
        Domain::Singleton { point } => point.clone(),
    };
    Ok(finish(s, f, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn opts() -> SpectralOptions {
        SpectralOptions { max_iter: Some(100_000), ..SpectralOptions::with_tol(1e-10) }
    }

    fn random_vec(d: usize, rng: &mut ChaCha8Rng) -> Vector {
        Vector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)))
    }

    #[test]
    fn exhausted_budget_falls_back_to_dense_solvers() {
        let tight = SpectralOptions { max_iter: Some(2), ..SpectralOptions::with_tol(1e-12) };
        // Nearly tied top eigenvalues 1 and 1 - 1e-9.
        let s = Vector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 1.0 - 1e-9, 0.0, 0.0, 0.0, -2.0]);
        let r = sharp(&s, &Domain::Spectrahedron { side: 3 }, &Objective::Zero, &tight).unwrap();
        assert_abs_diff_eq!(r.support_value, 1.0, epsilon = 1e-8);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_vec(12, &mut rng);
        let ball = Domain::NuclearBall { rows: 4, cols: 3, radius: 2.0 };
        let r = sharp(&s, &ball, &Objective::Zero, &tight).unwrap();
        let top = reshape(&s, 4, 3).singular_values().max();
        assert_abs_diff_eq!(r.support_value, 2.0 * top, epsilon = 1e-10);
    }

    #[test]
    fn tiny_inputs_still_find_the_top_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let s = random_vec(16, &mut rng) * 1e-4;
            let r = sharp(&s, &Domain::Spectrahedron { side: 4 }, &Objective::Zero, &SpectralOptions::default()).unwrap();
            let top = symmetric_part(&reshape(&s, 4, 4)).symmetric_eigenvalues().max();
            assert_abs_diff_eq!(r.support_value, top, epsilon = 1e-6 * top.abs());

            let ball = Domain::NuclearBall { rows: 4, cols: 4, radius: 1.0 };
            let r = sharp(&s, &ball, &Objective::Zero, &SpectralOptions::default()).unwrap();
            let top = reshape(&s, 4, 4).singular_values().max();
            assert_abs_diff_eq!(r.support_value, top, epsilon = 1e-6 * top);
        }
    }

    #[test]
    fn spectrahedron_diagonal() {
        let s = Vector::from_vec(vec![2.0, 0.0, 0.0, 1.0]);
        let r = sharp(&s, &Domain::Spectrahedron { side: 2 }, &Objective::Zero, &opts()).unwrap();
        assert_abs_diff_eq!(r.x_star, Vector::from_vec(vec![1.0, 0.0, 0.0, 0.0]), epsilon = 1e-8);
        assert_abs_diff_eq!(r.support_value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn l2_ball_cauchy_schwarz() {
        let s = Vector::from_vec(vec![3.0, -4.0]);
        let r = sharp(&s, &Domain::L2Ball { dim: 2, radius: 1.0 }, &Objective::Zero, &opts()).unwrap();
        assert_abs_diff_eq!(r.x_star, Vector::from_vec(vec![0.6, -0.8]), epsilon = 1e-15);
        assert_abs_diff_eq!(r.support_value, 5.0, epsilon = 1e-14);
    }

    #[test]
    fn spectrahedron_matches_rank_one_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let s = random_vec(25, &mut rng);
            let r = sharp(&s, &Domain::Spectrahedron { side: 5 }, &Objective::Zero, &opts()).unwrap();
            // Every extreme point of the spectrahedron is a rank-1 vvᵀ; the
            // eigenvectors of sym(S) are the candidates.
            let eig = symmetric_part(&reshape(&s, 5, 5)).symmetric_eigen();
            let mut best = f64::NEG_INFINITY;
            for j in 0..5 {
                let v = eig.eigenvectors.column(j).into_owned();
                best = best.max(s.dot(&rank_one(&v, &v)));
            }
            for _ in 0..2000 {
                let v = random_vec(5, &mut rng).normalize();
                assert!(s.dot(&rank_one(&v, &v)) <= r.support_value + 1e-9);
            }
            assert!((r.support_value - best).abs() <= 1e-6);
        }
    }

    #[test]
    fn l1_ball_picks_largest_coordinate() {
        let s = Vector::from_vec(vec![0.5, -3.0, 2.0]);
        let r = sharp(&s, &Domain::L1Ball { dim: 3, radius: 2.0 }, &Objective::Zero, &opts()).unwrap();
        assert_eq!(r.x_star, Vector::from_vec(vec![0.0, -2.0, 0.0]));
        assert_eq!(r.support_value, 6.0);
    }

    #[test]
    fn zero_direction_tie_breaking() {
        let z = Vector::zeros(4);
        let ball = sharp(&z, &Domain::L2Ball { dim: 4, radius: 1.0 }, &Objective::Zero, &opts()).unwrap();
        assert_eq!(ball.x_star, Vector::zeros(4));
        let spec = sharp(&z, &Domain::Spectrahedron { side: 2 }, &Objective::Zero, &opts()).unwrap();
        assert_eq!(spec.x_star, Vector::from_vec(vec![1.0, 0.0, 0.0, 0.0]));
        let simplex = sharp(&z, &Domain::Simplex { dim: 4 }, &Objective::Zero, &opts()).unwrap();
        assert_eq!(simplex.x_star[0], 1.0);
    }

    #[test]
    fn separable_quadratic_on_whole_space() {
        let c = Vector::from_vec(vec![1.0, -1.0]);
        let s = Vector::from_vec(vec![0.5, 2.0]);
        let f = Objective::SeparableQuadratic { center: c.clone() };
        let r = sharp(&s, &Domain::WholeSpace { dim: 2 }, &f, &opts()).unwrap();
        assert_eq!(r.x_star, &c + &s);
        assert_abs_diff_eq!(r.support_value, s.dot(&c) + 0.5 * s.norm_squared(), epsilon = 1e-14);
    }

    #[test]
    fn squared_nuclear_matches_random_rank_one_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Objective::SquaredNuclear { scale: 4.0, rows: 3, cols: 2 };
        let s = random_vec(6, &mut rng);
        let r = sharp(&s, &Domain::WholeSpace { dim: 6 }, &f, &opts()).unwrap();
        let sigma = reshape(&s, 3, 2).svd(false, false).singular_values.max();
        assert_abs_diff_eq!(r.support_value, 4.0 / 4.0 * sigma * sigma, epsilon = 1e-9);
        for _ in 0..5000 {
            let u = random_vec(3, &mut rng).normalize();
            let v = random_vec(2, &mut rng).normalize();
            let t = rng.random::<f64>() * 5.0;
            let x = rank_one(&u, &v) * t;
            assert!(s.dot(&x) - objective_at(&f, &x) <= r.support_value + 1e-9);
        }
    }

    #[test]
    fn unsupported_pairs() {
        let s = Vector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(
            sharp(&s, &Domain::WholeSpace { dim: 2 }, &Objective::Zero, &opts()),
            Err(Error::Unsupported(_))
        ));
        let f = Objective::SquaredNuclear { scale: 1.0, rows: 1, cols: 2 };
        assert!(matches!(
            sharp(&s, &Domain::L2Ball { dim: 2, radius: 1.0 }, &f, &opts()),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            sharp(&s, &Domain::L2Ball { dim: 3, radius: 1.0 }, &Objective::Zero, &opts()),
            Err(Error::Dimension { .. })
        ));
    }

    fn bounded_domains() -> Vec<Domain> {
        vec![
            Domain::L1Ball { dim: 6, radius: 1.5 },
            Domain::L2Ball { dim: 6, radius: 0.5 },
            Domain::NuclearBall { rows: 2, cols: 3, radius: 2.0 },
            Domain::Spectrahedron { side: 2 },
            Domain::Simplex { dim: 6 },
        ]
    }

    /// Gap between the two leading spectral values where the argmax is spectral.
    fn spectral_gap(s: &Vector, d: &Domain) -> f64 {
        let mut vals: Vec<f64> = match d {
            Domain::NuclearBall { rows, cols, .. } => {
                reshape(s, *rows, *cols).svd(false, false).singular_values.iter().copied().collect()
            }
            Domain::Spectrahedron { side } => symmetric_part(&reshape(s, *side, *side))
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .copied()
                .collect(),
            _ => return f64::INFINITY,
        };
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        vals[0] - vals[1]
    }

    fn fit(s: &[f64], d: &Domain) -> Vector {
        Vector::from_iterator(d.dim(), s.iter().copied().cycle().take(d.dim()))
    }

    proptest! {
        #[test]
        fn sharp_points_are_members_with_consistent_values(
            xs in proptest::collection::vec(-3.0f64..3.0, 6),
            pick in 0usize..5,
            quad in proptest::bool::ANY,
        ) {
            let d = &bounded_domains()[pick];
            let s = fit(&xs, d);
            let f = if quad {
                Objective::SeparableQuadratic { center: fit(&xs[1..], d) * 0.3 }
            } else {
                Objective::Zero
            };
            let r = sharp(&s, d, &f, &opts()).unwrap();
            prop_assert!(d.contains(&r.x_star, 1e-9));
            prop_assert!((r.support_value - (s.dot(&r.x_star) - objective_at(&f, &r.x_star))).abs() <= 1e-9);
        }

        #[test]
        fn argmax_is_invariant_under_positive_scaling(
            xs in proptest::collection::vec(-3.0f64..3.0, 6),
            pick in 0usize..5,
            alpha in 0.01f64..100.0,
        ) {
            let d = &bounded_domains()[pick];
            let s = fit(&xs, d);
            prop_assume!(spectral_gap(&s, d) > 1e-2);
            let a = sharp(&s, d, &Objective::Zero, &opts()).unwrap();
            let b = sharp(&(&s * alpha), d, &Objective::Zero, &opts()).unwrap();
            prop_assert!((a.x_star - b.x_star).norm() <= 1e-6);
        }

        #[test]
        fn support_value_dominates_members(
            xs in proptest::collection::vec(-3.0f64..3.0, 6),
            ys in proptest::collection::vec(-3.0f64..3.0, 6),
            pick in 0usize..5,
        ) {
            let d = &bounded_domains()[pick];
            let s = fit(&xs, d);
            let y = project_onto(d, &fit(&ys, d));
            let r = sharp(&s, d, &Objective::Zero, &opts()).unwrap();
            prop_assert!(s.dot(&y) <= r.support_value + 1e-7 * (1.0 + s.norm()));
        }
    }
}
