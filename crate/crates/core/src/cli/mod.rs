//! Command-line front end: `solve`, `gen` and `check`.
//!
//! Exit codes are 0 on success, 1 when a solver fails and 2 for configuration,
//! schema or usage errors. `UNIPD_SEED` overrides the configured seed.

pub mod commands;
pub mod config;
pub mod csv_trace;
pub mod schema;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::harness::{McFormulation, McSpec, QtSpec};
use crate::solvers::SolverKind;

pub use commands::{check, gen, solve, Failure, GenKind};
pub use config::{ProblemSource, ReferenceSpec, RunConfig, SolverSettings};
pub use csv_trace::write_trace;
pub use schema::{GeneratorSpec, LoadedProblem, ProblemFile};

#[derive(Parser, Debug)]
#[command(name = "unipd", version, about = "Universal primal-dual gradient solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the configured solvers and write one CSV trace per solver.
    Solve(RunArgs),
    /// Write a generated problem file.
    Gen {
        #[command(subcommand)]
        kind: GenCommand,
    },
    /// Check the convergence certificates against a reference solution.
    Check {
        #[command(flatten)]
        run: RunArgs,
        /// Compute a reference even when the configuration does not ask for one.
        #[arg(long)]
        reference: bool,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Run configuration (JSON).
    config: PathBuf,
    /// Comma-separated solver list, replacing the configured one.
    #[arg(long, value_delimiter = ',', value_parser = parse_solver)]
    solvers: Option<Vec<SolverKind>>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    i_max: Option<usize>,
    #[arg(long)]
    m_init: Option<f64>,
    /// Disable the practical stopping rule.
    #[arg(long)]
    no_practical_stop: bool,
    /// Trace directory, relative to the working directory.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, env = "UNIPD_SEED")]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum GenCommand {
    /// Tomography-style instance over the spectrahedron.
    Qt {
        #[arg(long)]
        qubits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of measurements; defaults to ⌊2p ln p⌋.
        #[arg(long)]
        measurements: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthetic low-rank matrix completion instance.
    Mc {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        frac: f64,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Formulation::SquaredNuclear)]
        formulation: Formulation,
        /// Nuclear-norm radius of the ball formulation; defaults to that of the ground truth.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Formulation {
    Ball,
    SquaredNuclear,
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    SolverKind::parse(s).ok_or_else(|| {
        let names: Vec<&str> = SolverKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown solver {s:?}; expected one of {}", names.join(", "))
    })
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig, Failure> {
        let mut cfg = RunConfig::read(&self.config).map_err(Failure::config)?;
        if let Some(s) = &self.solvers {
            cfg.solvers = s.clone();
        }
        if let Some(e) = self.epsilon {
            cfg.solver.epsilon = e;
        }
        if let Some(k) = self.k_max {
            cfg.solver.k_max = k;
        }
        if let Some(i) = self.i_max {
            cfg.solver.i_max = i;
        }
        if self.m_init.is_some() {
            cfg.solver.m_init = self.m_init;
        }
        if self.no_practical_stop {
            cfg.solver.practical_stop = false;
        }
        if let Some(o) = &self.output {
            cfg.output = std::env::current_dir().map_err(|e| Failure::config(e.into()))?.join(o);
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate().map_err(Failure::config)?;
        Ok(cfg)
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Solve(args) => solve(&args.load()?, out, err),
        Command::Check { run, reference } => check(&run.load()?, reference, out, err),
        Command::Gen { kind } => {
            let (kind, path) = match kind {
                GenCommand::Qt { qubits, seed, measurements, out } => {
                    (GenKind::Qt(QtSpec { qubits, seed, measurements }), out)
                }
                GenCommand::Mc { rows, cols, rank, frac, noise, seed, formulation, radius, out } => {
                    let formulation = match formulation {
                        Formulation::Ball => McFormulation::Ball { radius },
                        Formulation::SquaredNuclear => McFormulation::SquaredNuclear,
                    };
                    let spec = McSpec { rows, cols, rank, sample_fraction: frac, noise, seed };
                    (GenKind::Mc { spec, formulation }, out)
                }
            };
            gen(kind, path.as_deref(), out)
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.error);
            f.code
        }
    }
}
