//! JSON run configuration.
//!
//! ```json
//! {"problem": {"file": "kkt.json"},
//!  "solvers": ["unipd", "acc-unipd"],
//!  "solver": {"epsilon": 1e-3, "k_max": 2000},
//!  "reference": {"compute": {"accuracy": 1e-10}},
//!  "output": "traces",
//!  "seed": 0}
//! ```
//!
//! Relative paths are resolved against the directory of the configuration file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{load_ratings, McFormulation};
use crate::linop::{Vector, DEFAULT_SPECTRAL_TOL};
use crate::oracles::SpectralOptions;
use crate::solvers::{SolverConfig, SolverKind, StepMode, WeightMode};

use super::schema::{GeneratorSpec, LoadedProblem, ProblemFile};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RatingsSource {
    pub train: PathBuf,
    #[serde(default)]
    pub test: Option<PathBuf>,
    #[serde(default = "tab")]
    pub delimiter: char,
    pub formulation: McFormulation,
}

fn tab() -> char {
    '\t'
}

/// Exactly one problem source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemSource {
    File(PathBuf),
    Inline(ProblemFile),
    Generator(GeneratorSpec),
    Ratings(RatingsSource),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceSpec {
    /// Closed form when available, otherwise a long accelerated run.
    Compute { accuracy: f64 },
    Given {
        f_star: f64,
        #[serde(default)]
        lambda_star: Option<Vec<f64>>,
    },
}

/// Serialized mirror of [`SolverConfig`] with every field optional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub epsilon: f64,
    pub m_init: Option<f64>,
    pub k_max: usize,
    pub i_max: usize,
    pub step_mode: StepMode,
    pub weight_mode: WeightMode,
    pub lambda0: Option<Vec<f64>>,
    pub m_bar: Option<f64>,
    pub practical_stop: bool,
    pub spectral_tol: f64,
    pub spectral_max_iter: Option<usize>,
    pub record_timing: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            epsilon: d.epsilon,
            m_init: d.m_init,
            k_max: d.k_max,
            i_max: d.i_max,
            step_mode: d.step_mode,
            weight_mode: d.weight_mode,
            lambda0: None,
            m_bar: d.m_bar,
            practical_stop: d.practical_stop,
            spectral_tol: DEFAULT_SPECTRAL_TOL,
            spectral_max_iter: None,
            record_timing: d.record_timing,
        }
    }
}

impl SolverSettings {
    pub fn to_config(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            epsilon: self.epsilon,
            m_init: self.m_init,
            k_max: self.k_max,
            i_max: self.i_max,
            step_mode: self.step_mode,
            weight_mode: self.weight_mode,
            lambda0: self.lambda0.clone().map(Vector::from_vec),
            m_bar: self.m_bar,
            practical_stop: self.practical_stop,
            spectral: SpectralOptions {
                tol: self.spectral_tol,
                max_iter: self.spectral_max_iter,
                seed,
            },
            seed,
            record_timing: self.record_timing,
        }
    }
}

/// Attaches the file name and line to JSON errors.
fn located(path: &Path, e: Error) -> Error {
    match e {
        Error::Json(j) => Error::Parse {
            path: path.display().to_string(),
            line: j.line(),
            message: j.to_string(),
        },
        other => other,
    }
}

fn default_solvers() -> Vec<SolverKind> {
    vec![SolverKind::UniPd, SolverKind::AccUniPd]
}

fn default_output() -> PathBuf {
    PathBuf::from("traces")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSource,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverKind>,
    #[serde(default)]
    pub solver: SolverSettings,
    #[serde(default)]
    pub reference: Option<ReferenceSpec>,
    /// Directory receiving one `<solver>.csv` per selected solver.
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Directory relative paths are resolved against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text)?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_json(&text, &base).map_err(|e| located(path, e))
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(Error::Config("select at least one solver".into()));
        }
        for (i, s) in self.solvers.iter().enumerate() {
            if self.solvers[..i].contains(s) {
                return Err(Error::Config(format!("solver {} selected twice", s.name())));
            }
        }
        self.solver_config().validate()
    }

    pub fn solver_config(&self) -> SolverConfig {
        self.solver.to_config(self.seed)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output)
    }

    pub fn load_problem(&self) -> Result<LoadedProblem> {
        match &self.problem {
            ProblemSource::File(path) => {
                let path = self.resolve(path);
                let text = std::fs::read_to_string(&path)?;
                ProblemFile::from_json(&text).map_err(|e| located(&path, e))?.load()
            }
            ProblemSource::Inline(file) => file.load(),
            ProblemSource::Generator(spec) => spec.materialize(),
            ProblemSource::Ratings(src) => {
                if !src.delimiter.is_ascii() {
                    return Err(Error::Config(format!("delimiter {:?} is not ASCII", src.delimiter)));
                }
                let test = src.test.as_ref().map(|p| self.resolve(p));
                let inst = load_ratings(&self.resolve(&src.train), test.as_deref(), src.delimiter as u8)?;
                Ok(LoadedProblem {
                    problem: inst.problem(&src.formulation)?,
                    completion: Some(inst),
                })
            }
        }
    }
}
