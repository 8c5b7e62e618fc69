//! Linear operators and the spectral subroutines built on top of them.
//!
//! Every solver touches the constraint matrix only through [`LinearMap::apply`]
//! and [`LinearMap::adjoint_apply`]. Matrix-valued variables are flattened in
//! row-major order: entry `(i, j)` of a `rows x cols` matrix lives at
//! `i * cols + j`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Default tolerance of the spectral subroutines (relative residual).
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-5;

/// Default iteration budget of the power method on an operator of dimension `d`.
pub fn default_max_iter(d: usize) -> usize {
    10 * d + 500
}

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a CSR matrix from `(row, col, value)` triplets. Duplicate
    /// coordinates are summed.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for &(r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::InvalidArgument(format!(
                    "triplet ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            sorted.push((r, c, v));
        }
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *values.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            last = Some((r, c));
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(v);
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.values.len());
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                out.push((r, self.col_idx[k], self.values[k]));
            }
        }
        out
    }

    fn matvec(&self, x: &Vector) -> Vector {
        let mut y = Vector::zeros(self.rows);
        for r in 0..self.rows {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
        y
    }

    fn rmatvec(&self, y: &Vector) -> Vector {
        let mut x = Vector::zeros(self.cols);
        for r in 0..self.rows {
            let yr = y[r];
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                x[self.col_idx[k]] += self.values[k] * yr;
            }
        }
        x
    }
}

/// One of the four real 2x2 generators of the measurement ensemble.
///
/// `W` is the real matrix `[[0, 1], [-1, 0]]` (i.e. `i * Y`). Each generator has
/// exactly one nonzero per row, so every tensor product is a signed
/// permutation matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    I,
    X,
    Z,
    W,
}

impl Generator {
    pub const ALL: [Generator; 4] = [Generator::I, Generator::X, Generator::Z, Generator::W];

    /// Column and sign of the nonzero in row `a` (0 or 1).
    fn entry(self, a: usize) -> (usize, f64) {
        match self {
            Generator::I => (a, 1.0),
            Generator::X => (1 - a, 1.0),
            Generator::Z => (a, if a == 0 { 1.0 } else { -1.0 }),
            Generator::W => (1 - a, if a == 0 { 1.0 } else { -1.0 }),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Generator::I => 'I',
            Generator::X => 'X',
            Generator::Z => 'Z',
            Generator::W => 'W',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'I' => Some(Generator::I),
            'X' => Some(Generator::X),
            'Z' => Some(Generator::Z),
            'W' => Some(Generator::W),
            _ => None,
        }
    }
}

/// A tensor product of generators, stored as the signed permutation it induces.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliRow {
    generators: Vec<Generator>,
    cols: Vec<usize>,
    signs: Vec<f64>,
}

impl PauliRow {
    /// The first generator acts on the most significant bit of the row index.
    pub fn new(generators: Vec<Generator>) -> Self {
        let q = generators.len();
        let p = 1usize << q;
        let mut cols = vec![0usize; p];
        let mut signs = vec![1.0; p];
        for r in 0..p {
            let mut col = 0usize;
            let mut sign = 1.0;
            for (j, g) in generators.iter().enumerate() {
                let bit = (r >> (q - 1 - j)) & 1;
                let (c, s) = g.entry(bit);
                col |= c << (q - 1 - j);
                sign *= s;
            }
            cols[r] = col;
            signs[r] = sign;
        }
        Self {
            generators,
            cols,
            signs,
        }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Symmetric iff it contains an even number of `W` factors.
    pub fn is_symmetric(&self) -> bool {
        self.generators.iter().filter(|g| **g == Generator::W).count() % 2 == 0
    }

    pub fn label(&self) -> String {
        self.generators.iter().map(|g| g.symbol()).collect()
    }
}

/// Matrix-free ensemble of normalized tensor-product measurements acting on
/// `p x p` matrices, `p = 2^qubits`. Row `i` computes `<P_i, X> / sqrt(p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliEnsemble {
    qubits: usize,
    rows: Vec<PauliRow>,
}

impl PauliEnsemble {
    pub fn new(qubits: usize, rows: Vec<PauliRow>) -> Result<Self> {
        if qubits == 0 {
            return Err(Error::InvalidArgument("ensemble needs at least one qubit".into()));
        }
        for row in &rows {
            if row.generators.len() != qubits {
                return Err(Error::dim("PauliEnsemble row", qubits, row.generators.len()));
            }
        }
        Ok(Self { qubits, rows })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn side(&self) -> usize {
        1 << self.qubits
    }

    pub fn rows(&self) -> &[PauliRow] {
        &self.rows
    }

    fn scale(&self) -> f64 {
        1.0 / (self.side() as f64).sqrt()
    }

    fn matvec(&self, x: &Vector) -> Vector {
        let p = self.side();
        let scale = self.scale();
        Vector::from_iterator(
            self.rows.len(),
            self.rows.iter().map(|row| {
                let mut acc = 0.0;
                for r in 0..p {
                    acc += row.signs[r] * x[r * p + row.cols[r]];
                }
                scale * acc
            }),
        )
    }

    fn rmatvec(&self, y: &Vector) -> Vector {
        let p = self.side();
        let scale = self.scale();
        let mut x = Vector::zeros(p * p);
        for (row, &yi) in self.rows.iter().zip(y.iter()) {
            let w = scale * yi;
            for r in 0..p {
                x[r * p + row.cols[r]] += w * row.signs[r];
            }
        }
        x
    }
}

/// A linear map `A: R^p -> R^n`.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearMap {
    Identity { dim: usize },
    Dense(Matrix),
    Sparse(SparseMatrix),
    /// Selects the listed coordinates of its input (an entry-sampling mask).
    Sampling { input_dim: usize, indices: Vec<usize> },
    Pauli(PauliEnsemble),
    /// `outer ∘ inner`.
    Compose { outer: Box<LinearMap>, inner: Box<LinearMap> },
}

impl LinearMap {
    pub fn identity(dim: usize) -> Self {
        LinearMap::Identity { dim }
    }

    pub fn sampling(input_dim: usize, indices: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= input_dim) {
            return Err(Error::InvalidArgument(format!(
                "sampling index {bad} out of range for input dimension {input_dim}"
            )));
        }
        Ok(LinearMap::Sampling { input_dim, indices })
    }

    pub fn compose(outer: LinearMap, inner: LinearMap) -> Result<Self> {
        if outer.input_dim() != inner.output_dim() {
            return Err(Error::dim("compose", outer.input_dim(), inner.output_dim()));
        }
        Ok(LinearMap::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        })
    }

    pub fn input_dim(&self) -> usize {
        match self {
            LinearMap::Identity { dim } => *dim,
            LinearMap::Dense(m) => m.ncols(),
            LinearMap::Sparse(s) => s.cols,
            LinearMap::Sampling { input_dim, .. } => *input_dim,
            LinearMap::Pauli(e) => e.side() * e.side(),
            LinearMap::Compose { inner, .. } => inner.input_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            LinearMap::Identity { dim } => *dim,
            LinearMap::Dense(m) => m.nrows(),
            LinearMap::Sparse(s) => s.rows,
            LinearMap::Sampling { indices, .. } => indices.len(),
            LinearMap::Pauli(e) => e.rows.len(),
            LinearMap::Compose { outer, .. } => outer.output_dim(),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.input_dim() {
            return Err(Error::dim("LinearMap::apply", self.input_dim(), x.len()));
        }
        Ok(self.apply_unchecked(x))
    }

    pub fn adjoint_apply(&self, y: &Vector) -> Result<Vector> {
        if y.len() != self.output_dim() {
            return Err(Error::dim("LinearMap::adjoint_apply", self.output_dim(), y.len()));
        }
        Ok(self.adjoint_unchecked(y))
    }

    fn apply_unchecked(&self, x: &Vector) -> Vector {
        match self {
            LinearMap::Identity { .. } => x.clone(),
            LinearMap::Dense(m) => m * x,
            LinearMap::Sparse(s) => s.matvec(x),
            LinearMap::Sampling { indices, .. } => {
                Vector::from_iterator(indices.len(), indices.iter().map(|&i| x[i]))
            }
            LinearMap::Pauli(e) => e.matvec(x),
            LinearMap::Compose { outer, inner } => outer.apply_unchecked(&inner.apply_unchecked(x)),
        }
    }

    fn adjoint_unchecked(&self, y: &Vector) -> Vector {
        match self {
            LinearMap::Identity { .. } => y.clone(),
            LinearMap::Dense(m) => m.tr_mul(y),
            LinearMap::Sparse(s) => s.rmatvec(y),
            LinearMap::Sampling { input_dim, indices } => {
                let mut x = Vector::zeros(*input_dim);
                for (&i, &v) in indices.iter().zip(y.iter()) {
                    x[i] += v;
                }
                x
            }
            LinearMap::Pauli(e) => e.rmatvec(y),
            LinearMap::Compose { outer, inner } => {
                inner.adjoint_unchecked(&outer.adjoint_unchecked(y))
            }
        }
    }

    /// Materializes the operator as a dense `n x p` matrix. Intended for
    /// small problems (reference solves, tests).
    pub fn to_dense(&self) -> Matrix {
        if let LinearMap::Dense(m) = self {
            return m.clone();
        }
        let (n, p) = (self.output_dim(), self.input_dim());
        let mut out = Matrix::zeros(n, p);
        let mut e = Vector::zeros(p);
        for j in 0..p {
            e[j] = 1.0;
            out.set_column(j, &self.apply_unchecked(&e));
            e[j] = 0.0;
        }
        out
    }

    /// Spectral norm estimate `||A||` from the power method on `A^T A`.
    pub fn norm_estimate(&self, tol: f64, seed: u64) -> Result<f64> {
        match self {
            LinearMap::Identity { .. } => return Ok(1.0),
            LinearMap::Sampling { indices, .. } => {
                return Ok(if indices.is_empty() { 0.0 } else { 1.0 });
            }
            _ => {}
        }
        if self.input_dim() == 0 || self.output_dim() == 0 {
            return Ok(0.0);
        }
        let gram = GramOperator { map: self };
        let res = power_method(&gram, tol, default_max_iter(self.input_dim()), seed)?;
        Ok(res.value.max(0.0).sqrt())
    }
}

/// A symmetric linear operator on `R^d`.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    fn apply_sym(&self, x: &Vector) -> Vector;
}

impl SymmetricOperator for Matrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply_sym(&self, x: &Vector) -> Vector {
        self * x
    }
}

/// `A^T A` applied matrix-free.
pub struct GramOperator<'a> {
    pub map: &'a LinearMap,
}

impl SymmetricOperator for GramOperator<'_> {
    fn dim(&self) -> usize {
        self.map.input_dim()
    }

    fn apply_sym(&self, x: &Vector) -> Vector {
        self.map.adjoint_unchecked(&self.map.apply_unchecked(x))
    }
}

/// `M^T M` (or `M M^T` when `outer`) for a dense matrix, never formed.
struct MatrixGram<'a> {
    m: &'a Matrix,
    outer: bool,
}

impl SymmetricOperator for MatrixGram<'_> {
    fn dim(&self) -> usize {
        if self.outer {
            self.m.nrows()
        } else {
            self.m.ncols()
        }
    }

    fn apply_sym(&self, x: &Vector) -> Vector {
        if self.outer {
            self.m * self.m.tr_mul(x)
        } else {
            self.m.tr_mul(&(self.m * x))
        }
    }
}

/// Top eigenpair or singular triplet.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralResult {
    pub value: f64,
    pub left: Vector,
    pub right: Vector,
    pub iterations: usize,
    pub residual: f64,
}

/// Seeded pseudorandom unit vector.
pub fn random_unit(d: usize, seed: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v = Vector::from_iterator(d, (0..d).map(|_| StandardNormal.sample(&mut rng)));
        let n = v.norm();
        if n > 0.0 {
            return v / n;
        }
    }
}

/// Flips `v` so that its largest-magnitude coordinate is positive.
pub fn fix_sign(v: &mut Vector) {
    let mut best = 0usize;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v.len() > 0 && v[best] < 0.0 {
        v.neg_mut();
    }
}

enum Outcome {
    Converged,
    /// The radius estimate settled while the Rayleigh quotient stays well below
    /// it, so the iterate mixes eigenspaces of opposite sign; the payload is
    /// the settled estimate of the spectral radius.
    Oscillating(f64),
    /// `S v = 0`: the iterate lies in the null space.
    Stagnated,
    Exhausted,
}

struct Iterate {
    v: Vector,
    theta: f64,
    residual: f64,
}

/// Plain power iteration on `S + shift I`. `theta` is reported unshifted.
fn iterate(
    op: &dyn SymmetricOperator,
    shift: f64,
    state: &mut Iterate,
    tol: f64,
    budget: usize,
    used: &mut usize,
    mut observe: impl FnMut(f64),
) -> Outcome {
    let d = state.v.len();
    let mut last_radius = f64::NAN;
    let mut stalled = 0usize;
    while *used < budget {
        *used += 1;
        let mut w = op.apply_sym(&state.v);
        if shift != 0.0 {
            w.axpy(shift, &state.v, 1.0);
        }
        let radius = w.norm();
        if radius == 0.0 {
            return Outcome::Stagnated;
        }
        let theta = state.v.dot(&w);
        let residual = (&w - &state.v * theta).norm();
        state.theta = theta - shift;
        state.residual = residual;
        observe(theta);
        let floor = 4.0 * f64::EPSILON * radius * (d as f64).sqrt();
        if residual <= (tol * state.theta.abs().max(1.0)).max(floor) {
            return Outcome::Converged;
        }
        if shift == 0.0 && (radius - last_radius).abs() <= 1e-6 * radius {
            stalled += 1;
            if stalled >= 3 && theta < (1.0 - 1e-3) * radius {
                return Outcome::Oscillating(radius);
            }
        } else {
            stalled = 0;
        }
        last_radius = radius;
        state.v = w / radius;
    }
    Outcome::Exhausted
}

/// Algebraically largest eigenpair of a symmetric operator.
///
/// Plain power iteration is run first. If it settles on a negative dominant
/// eigenvalue, or keeps oscillating between eigenspaces of opposite sign, the
/// operator is shifted by the spectral-radius estimate so that the top
/// eigenvalue becomes dominant, and the iteration restarts from a fresh
/// seeded vector. Convergence means `||S v - value v|| <= tol * max(|value|, 1)`.
pub fn power_method(
    op: &dyn SymmetricOperator,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SpectralResult> {
    power_method_observed(op, tol, max_iter, seed, |_| {})
}

pub(crate) fn power_method_observed(
    op: &dyn SymmetricOperator,
    tol: f64,
    max_iter: usize,
    seed: u64,
    mut observe: impl FnMut(f64),
) -> Result<SpectralResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("power method tolerance must be positive, got {tol}")));
    }
    let d = op.dim();
    if d == 0 {
        return Err(Error::InvalidArgument("power method on an empty operator".into()));
    }

    let mut used = 0usize;
    let mut state = Iterate {
        v: random_unit(d, seed),
        theta: 0.0,
        residual: f64::INFINITY,
    };
    let mut restarts = 0u64;
    let shift = loop {
        match iterate(op, 0.0, &mut state, tol, max_iter, &mut used, &mut observe) {
            Outcome::Converged if state.theta >= 0.0 => break None,
            Outcome::Converged => break Some(state.theta.abs()),
            Outcome::Oscillating(radius) => break Some(radius),
            Outcome::Stagnated => {
                // Deterministic restart; a null-space hit on every restart
                // means the operator vanishes on all probes.
                restarts += 1;
                if restarts > 4 {
                    let mut e = Vector::zeros(d);
                    e[0] = 1.0;
                    let residual = op.apply_sym(&e).norm();
                    if residual <= tol {
                        return Ok(SpectralResult {
                            value: 0.0,
                            left: e.clone(),
                            right: e,
                            iterations: used,
                            residual,
                        });
                    }
                    state.v = e;
                } else {
                    state.v = random_unit(d, seed.wrapping_add(restarts));
                }
            }
            Outcome::Exhausted => return Err(convergence_failure(state, used)),
        }
    };

    if let Some(shift) = shift {
        state.v = random_unit(d, seed.wrapping_add(0x9e37_79b9));
        match iterate(op, shift, &mut state, tol, max_iter, &mut used, &mut observe) {
            Outcome::Converged => {}
            _ => return Err(convergence_failure(state, used)),
        }
    }

    let mut v = state.v;
    fix_sign(&mut v);
    Ok(SpectralResult {
        value: state.theta,
        left: v.clone(),
        right: v,
        iterations: used,
        residual: state.residual,
    })
}

fn convergence_failure(state: Iterate, used: usize) -> Error {
    let mut v = state.v;
    fix_sign(&mut v);
    Error::Convergence {
        best: Box::new(SpectralResult {
            value: state.theta,
            left: v.clone(),
            right: v,
            iterations: used,
            residual: state.residual,
        }),
    }
}

/// Top singular triplet `(sigma_1, u_1, v_1)` of a dense matrix via the power
/// method on the smaller Gram matrix. The right vector is sign-normalized when
/// iterating on `M^T M`, the left one otherwise. `residual` is
/// `||M^T u - sigma v||`.
pub fn top_singular_triplet(m: &Matrix, tol: f64, max_iter: usize, seed: u64) -> Result<SpectralResult> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument("singular triplet of an empty matrix".into()));
    }
    let outer = rows < cols;
    let gram = MatrixGram { m, outer };
    let eig = power_method(&gram, tol, max_iter, seed)?;
    let base = eig.left;

    let (mut u, mut v) = if outer {
        let v = m.tr_mul(&base);
        (base, v)
    } else {
        let u = m * &base;
        (u, base)
    };
    let sigma = if outer { v.norm() } else { u.norm() };
    if sigma == 0.0 {
        let mut e_u = Vector::zeros(rows);
        e_u[0] = 1.0;
        let mut e_v = Vector::zeros(cols);
        e_v[0] = 1.0;
        return Ok(SpectralResult {
            value: 0.0,
            left: e_u,
            right: e_v,
            iterations: eig.iterations,
            residual: 0.0,
        });
    }
    if outer {
        v /= sigma;
    } else {
        u /= sigma;
    }
    let residual = (m.tr_mul(&u) - &v * sigma).norm().max((m * &v - &u * sigma).norm());
    Ok(SpectralResult {
        value: sigma,
        left: u,
        right: v,
        iterations: eig.iterations,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
    }

    fn random_vector(d: usize, rng: &mut ChaCha8Rng) -> Vector {
        Vector::from_iterator(d, (0..d).map(|_| rng.sample(StandardNormal)))
    }

    fn random_pauli(qubits: usize, n: usize, seed: u64) -> LinearMap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..n)
            .map(|_| {
                PauliRow::new(
                    (0..qubits)
                        .map(|_| Generator::ALL[rng.random_range(0..4)])
                        .collect(),
                )
            })
            .collect();
        LinearMap::Pauli(PauliEnsemble::new(qubits, rows).unwrap())
    }

    fn all_kinds() -> Vec<LinearMap> {
        let sparse = SparseMatrix::from_triplets(
            4,
            6,
            &[(0, 0, 1.5), (0, 5, -2.0), (1, 2, 0.5), (3, 3, 4.0), (3, 3, -1.0), (2, 1, 0.25)],
        )
        .unwrap();
        vec![
            LinearMap::identity(5),
            LinearMap::Dense(random_matrix(7, 5, 3)),
            LinearMap::Sparse(sparse),
            LinearMap::sampling(9, vec![0, 4, 8, 2]).unwrap(),
            random_pauli(3, 20, 11),
            LinearMap::compose(
                LinearMap::Dense(random_matrix(3, 7, 5)),
                LinearMap::Dense(random_matrix(7, 6, 6)),
            )
            .unwrap(),
        ]
    }

    #[test]
    fn identity_apply_and_adjoint() {
        let id = LinearMap::identity(3);
        let x = Vector::from_vec(vec![1.0, 2.0, 3.0]);
        assert_eq!(id.apply(&x).unwrap(), x);
        let id2 = LinearMap::identity(2);
        let y = Vector::from_vec(vec![4.0, 5.0]);
        assert_eq!(id2.adjoint_apply(&y).unwrap(), y);
    }

    #[test]
    fn sampling_selects_and_pads() {
        // 1-based {1, 3} is 0-based {0, 2}.
        let mask = LinearMap::sampling(4, vec![0, 2]).unwrap();
        let x = Vector::from_vec(vec![5.0, 6.0, 7.0, 8.0]);
        assert_eq!(mask.apply(&x).unwrap(), Vector::from_vec(vec![5.0, 7.0]));
        let y = Vector::from_vec(vec![9.0, 9.0]);
        assert_eq!(
            mask.adjoint_apply(&y).unwrap(),
            Vector::from_vec(vec![9.0, 0.0, 9.0, 0.0])
        );
    }

    #[test]
    fn dense_matches_explicit_product() {
        let m = random_matrix(3, 3, 42);
        let map = LinearMap::Dense(m.clone());
        let x = Vector::from_vec(vec![0.3, -1.2, 2.5]);
        let got = map.apply(&x).unwrap();
        for i in 0..3 {
            let mut expect = 0.0;
            for j in 0..3 {
                expect += m[(i, j)] * x[j];
            }
            assert_abs_diff_eq!(got[i], expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let map = LinearMap::Dense(random_matrix(2, 3, 1));
        assert!(matches!(
            map.apply(&Vector::zeros(2)),
            Err(Error::Dimension { expected: 3, got: 2, .. })
        ));
        assert!(matches!(
            map.adjoint_apply(&Vector::zeros(3)),
            Err(Error::Dimension { expected: 2, got: 3, .. })
        ));
    }

    #[test]
    fn adjoint_consistency_for_every_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for map in all_kinds() {
            let norm = map.norm_estimate(1e-10, 1).unwrap();
            for _ in 0..100 {
                let x = random_vector(map.input_dim(), &mut rng);
                let y = random_vector(map.output_dim(), &mut rng);
                let lhs = map.apply(&x).unwrap().dot(&y);
                let rhs = x.dot(&map.adjoint_apply(&y).unwrap());
                let scale = x.norm() * y.norm() * norm.max(1.0);
                assert!((lhs - rhs).abs() <= 1e-10 * scale, "{map:?}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn application_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for map in all_kinds() {
            let x = random_vector(map.input_dim(), &mut rng);
            assert_eq!(map.apply(&x).unwrap(), map.apply(&x).unwrap());
        }
    }

    #[test]
    fn pauli_rows_are_unit_norm_signed_permutations() {
        let map = random_pauli(3, 12, 2);
        let dense = map.to_dense();
        for i in 0..dense.nrows() {
            assert_abs_diff_eq!(dense.row(i).norm(), 1.0, epsilon = 1e-14);
        }
        let row = PauliRow::new(vec![Generator::W, Generator::W]);
        assert!(row.is_symmetric());
        assert!(!PauliRow::new(vec![Generator::W, Generator::X]).is_symmetric());
        assert_eq!(row.label(), "WW");
    }

    #[test]
    fn sparse_sums_duplicates() {
        let s = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (0, 1, 2.0), (1, 0, -1.0)]).unwrap();
        assert_eq!(s.triplets(), vec![(0, 1, 3.0), (1, 0, -1.0)]);
        assert!(SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn power_method_diagonal() {
        let m = Matrix::from_diagonal(&Vector::from_vec(vec![3.0, 1.0]));
        let res = power_method(&m, 1e-8, 1000, 0).unwrap();
        assert_abs_diff_eq!(res.value, 3.0, epsilon = 1e-7);
        assert_abs_diff_eq!(res.left[0].abs(), 1.0, epsilon = 1e-6);
        assert!(res.left[0] > 0.0);
    }

    #[test]
    fn power_method_identity() {
        let m = Matrix::identity(3, 3);
        let res = power_method(&m, 1e-8, 100, 0).unwrap();
        assert_abs_diff_eq!(res.value, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(res.left.norm(), 1.0, epsilon = 1e-12);
        assert!(res.residual <= 1e-14);
    }

    #[test]
    fn power_method_picks_algebraic_top_when_dominant_is_negative() {
        let m = Matrix::from_diagonal(&Vector::from_vec(vec![-5.0, 2.0, 1.0]));
        let res = power_method(&m, 1e-9, 5000, 3).unwrap();
        assert_abs_diff_eq!(res.value, 2.0, epsilon = 1e-7);

        let pm = Matrix::from_diagonal(&Vector::from_vec(vec![-1.0, 1.0, 0.5]));
        let res = power_method(&pm, 1e-9, 5000, 3).unwrap();
        assert_abs_diff_eq!(res.value, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn power_method_zero_operator() {
        let res = power_method(&Matrix::zeros(4, 4), 1e-8, 100, 0).unwrap();
        assert_eq!(res.value, 0.0);
        assert_abs_diff_eq!(res.left.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn power_method_matches_dense_eigensolver() {
        for seed in 0..20 {
            let a = random_matrix(6, 6, 100 + seed);
            let s = (&a + a.transpose()) * 0.5;
            let exact = s.clone().symmetric_eigen().eigenvalues.max();
            let res = power_method(&s, 1e-9, default_max_iter(6) * 20, seed).unwrap();
            assert!((res.value - exact).abs() <= 1e-6, "seed {seed}: {} vs {exact}", res.value);
            assert!(res.residual <= 1e-9 * res.value.abs().max(1.0));
            assert_abs_diff_eq!(res.left.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn power_method_reports_best_iterate_on_failure() {
        let m = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 0.999_999, 0.5]));
        match power_method(&m, 1e-14, 3, 0) {
            Err(Error::Convergence { best }) => {
                assert_eq!(best.iterations, 3);
                assert_abs_diff_eq!(best.left.norm(), 1.0, epsilon = 1e-12);
            }
            other => panic!("expected convergence failure, got {other:?}"),
        }
        assert!(power_method(&m, 0.0, 10, 0).is_err());
    }

    #[test]
    fn rayleigh_quotient_ascends_on_psd_operators() {
        for seed in 0..10 {
            let a = random_matrix(8, 8, 300 + seed);
            let s = a.transpose() * &a;
            let mut history = Vec::new();
            power_method_observed(&s, 1e-12, 10_000, seed, |t| history.push(t)).unwrap();
            for w in history.windows(2) {
                assert!(w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0), "{} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn power_method_is_deterministic() {
        let a = random_matrix(5, 5, 9);
        let s = &a + a.transpose();
        let r1 = power_method(&s, 1e-8, 5000, 4).unwrap();
        let r2 = power_method(&s, 1e-8, 5000, 4).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn singular_triplet_diagonal() {
        let m = Matrix::from_diagonal(&Vector::from_vec(vec![5.0, 2.0]));
        let res = top_singular_triplet(&m, 1e-10, 1000, 0).unwrap();
        assert_abs_diff_eq!(res.value, 5.0, epsilon = 1e-9);
        assert_abs_diff_eq!(res.left[0], 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(res.right[0], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn singular_triplet_rank_one() {
        let a = Vector::from_vec(vec![2.0, 0.0, 0.0]);
        let b = Vector::from_vec(vec![0.0, 3.0 / 5.0 * 3.0, 4.0 / 5.0 * 3.0]);
        let m = &a * b.transpose();
        let res = top_singular_triplet(&m, 1e-10, 1000, 0).unwrap();
        assert_abs_diff_eq!(res.value, 6.0, epsilon = 1e-9);
    }

    #[test]
    fn singular_triplet_matches_dense_svd() {
        for seed in 0..10 {
            let m = random_matrix(8, 5, 500 + seed);
            let exact = m.clone().svd(false, false).singular_values.max();
            let res = top_singular_triplet(&m, 1e-10, 10_000, seed).unwrap();
            assert!((res.value - exact).abs() <= 1e-6);
            assert!((&m * &res.right - &res.left * res.value).norm() <= 1e-10 * res.value.max(1.0));
            assert_abs_diff_eq!(res.left.norm(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(res.right.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn singular_value_of_transpose_agrees() {
        for seed in 0..10 {
            let m = random_matrix(7, 4, 700 + seed);
            let s1 = top_singular_triplet(&m, 1e-10, 10_000, seed).unwrap().value;
            let s2 = top_singular_triplet(&m.transpose(), 1e-10, 10_000, seed).unwrap().value;
            assert!((s1 - s2).abs() <= 1e-8);
        }
    }

    #[test]
    fn norm_estimate_matches_svd() {
        let m = random_matrix(6, 9, 1);
        let exact = m.clone().svd(false, false).singular_values.max();
        let est = LinearMap::Dense(m).norm_estimate(1e-12, 0).unwrap();
        assert_abs_diff_eq!(est, exact, epsilon = 1e-6);
    }
}
