//! Matrix-completion instances: synthetic low-rank ground truth and
//! tab-separated rating files.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linop::{LinearMap, Matrix, Vector};
use crate::problem::{nuclear_norm, ConstraintSet, Domain, Objective, Problem};

/// One observed entry, zero-based.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum McFormulation {
    /// Least squares over `{‖X‖_* ≤ radius}`; `None` takes the nuclear norm of
    /// the ground truth.
    Ball {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    /// `(1/n)‖X‖_*²` subject to matching every observation exactly.
    SquaredNuclear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McSpec {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub sample_fraction: f64,
    #[serde(default)]
    pub noise: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct McInstance {
    pub rows: usize,
    pub cols: usize,
    /// Known only for synthetic instances.
    pub truth: Option<Matrix>,
    /// Sorted by row-major index.
    pub train: Vec<Entry>,
    pub test: Vec<Entry>,
}

/// Number of observed entries, `⌊fraction · rows · cols⌋`.
pub fn sample_count(spec: &McSpec) -> usize {
    (spec.sample_fraction * (spec.rows * spec.cols) as f64).floor() as usize
}

pub fn gen_mc(spec: &McSpec) -> Result<McInstance> {
    let (p, l) = (spec.rows, spec.cols);
    if p == 0 || l == 0 {
        return Err(Error::InvalidArgument("matrix shape must be positive".into()));
    }
    if spec.rank > p.min(l) {
        return Err(Error::InvalidArgument(format!("rank {} exceeds min({p}, {l})", spec.rank)));
    }
    if !(spec.sample_fraction > 0.0 && spec.sample_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sample fraction must lie in (0, 1], got {}",
            spec.sample_fraction
        )));
    }
    if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise must be nonnegative, got {}", spec.noise)));
    }
    let count = sample_count(spec);
    if count == 0 {
        return Err(Error::InvalidArgument("sample fraction selects no entries".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let left = Matrix::from_fn(p, spec.rank, |_, _| rng.sample(StandardNormal));
    let right = Matrix::from_fn(l, spec.rank, |_, _| rng.sample(StandardNormal));
    let truth = &left * right.transpose();

    let mut picked = index::sample(&mut rng, p * l, count).into_vec();
    picked.sort_unstable();
    let observed: HashSet<usize> = picked.iter().copied().collect();
    let train = picked
        .iter()
        .map(|&idx| {
            let (row, col) = (idx / l, idx % l);
            let noise = if spec.noise > 0.0 {
                spec.noise * rng.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            };
            Entry { row, col, value: truth[(row, col)] + noise }
        })
        .collect();
    let test = (0..p * l)
        .filter(|idx| !observed.contains(idx))
        .map(|idx| Entry { row: idx / l, col: idx % l, value: truth[(idx / l, idx % l)] })
        .collect();
    Ok(McInstance { rows: p, cols: l, truth: Some(truth), train, test })
}

impl McInstance {
    pub fn dim(&self) -> usize {
        self.rows * self.cols
    }

    pub fn train_indices(&self) -> Vec<usize> {
        self.train.iter().map(|e| e.row * self.cols + e.col).collect()
    }

    pub fn observations(&self) -> Vector {
        Vector::from_iterator(self.train.len(), self.train.iter().map(|e| e.value))
    }

    pub fn sampling_map(&self) -> Result<LinearMap> {
        LinearMap::sampling(self.dim(), self.train_indices())
    }

    pub fn problem(&self, formulation: &McFormulation) -> Result<Problem> {
        let map = self.sampling_map()?;
        let b = self.observations();
        match formulation {
            McFormulation::Ball { radius } => {
                let radius = match (radius, &self.truth) {
                    (Some(r), _) => *r,
                    (None, Some(t)) => nuclear_norm(t),
                    (None, None) => {
                        return Err(Error::Config(
                            "ball formulation needs a radius when no ground truth is known".into(),
                        ))
                    }
                };
                Problem::new(
                    Objective::QuadraticSlack,
                    map,
                    b,
                    Domain::NuclearBall { rows: self.rows, cols: self.cols, radius },
                    ConstraintSet::ZeroPoint,
                )
            }
            McFormulation::SquaredNuclear => Problem::new(
                Objective::SquaredNuclear {
                    scale: self.train.len() as f64,
                    rows: self.rows,
                    cols: self.cols,
                },
                map,
                b,
                Domain::WholeSpace { dim: self.dim() },
                ConstraintSet::ZeroPoint,
            ),
        }
    }
}

/// Parses `user<d>item<d>rating[<d>timestamp]` lines with 1-based indices.
fn read_entries(path: &Path, delimiter: u8) -> Result<Vec<(usize, usize, f64, usize)>> {
    let shown = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse { path: shown.clone(), line: 0, message: format!("{other:?}") },
        })?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            path: shown.clone(),
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let fail = |message: String| Error::Parse { path: shown.clone(), line, message };
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() < 3 || record.len() > 4 {
            return Err(fail(format!("expected 3 or 4 fields, found {}", record.len())));
        }
        let index = |i: usize, what: &str| -> Result<usize> {
            match record[i].parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(fail(format!("{what} index must be a positive integer, found {:?}", &record[i]))),
            }
        };
        let user = index(0, "user")?;
        let item = index(1, "item")?;
        let rating: f64 = record[2]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| fail(format!("rating must be a number, found {:?}", &record[2])))?;
        out.push((user, item, rating, line));
    }
    Ok(out)
}

fn to_entries(path: &Path, raw: Vec<(usize, usize, f64, usize)>, seen: &mut HashSet<(usize, usize)>, other: &str) -> Result<Vec<Entry>> {
    let mut entries = Vec::with_capacity(raw.len());
    let mut own = HashSet::with_capacity(raw.len());
    for (row, col, value, line) in raw {
        if !own.insert((row, col)) {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line,
                message: format!("duplicate pair ({}, {})", row + 1, col + 1),
            });
        }
        if seen.contains(&(row, col)) {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line,
                message: format!("pair ({}, {}) also appears in {other}", row + 1, col + 1),
            });
        }
        entries.push(Entry { row, col, value });
    }
    seen.extend(own);
    Ok(entries)
}

/// Loads a training file and an optional held-out file. The matrix shape is
/// the largest user and item index found in either file.
pub fn load_ratings(train: &Path, test: Option<&Path>, delimiter: u8) -> Result<McInstance> {
    let train_raw = read_entries(train, delimiter)?;
    let test_raw = match test {
        Some(path) => read_entries(path, delimiter)?,
        None => Vec::new(),
    };
    let rows = train_raw.iter().chain(&test_raw).map(|e| e.0 + 1).max().unwrap_or(0);
    let cols = train_raw.iter().chain(&test_raw).map(|e| e.1 + 1).max().unwrap_or(0);
    if train_raw.is_empty() {
        return Err(Error::Parse {
            path: train.display().to_string(),
            line: 0,
            message: "no ratings found".into(),
        });
    }
    let mut seen = HashSet::new();
    let mut train_entries = to_entries(train, train_raw, &mut seen, "the test file")?;
    let test_entries = match test {
        Some(path) => to_entries(path, test_raw, &mut seen, "the training file")?,
        None => Vec::new(),
    };
    train_entries.sort_by_key(|e| e.row * cols + e.col);
    Ok(McInstance { rows, cols, truth: None, train: train_entries, test: test_entries })
}
