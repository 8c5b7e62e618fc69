//! Universal primal-dual gradient methods for `min f(x) s.t. Ax - b ∈ K, x ∈ X`.
//!
//! The solvers touch the problem only through the sharp operator of `(X, f)`,
//! the proximal operator of the support function of `K`, and applications of
//! `A` and its adjoint. Their line-search adapts to the unknown Hölder
//! smoothness of the dual.

pub mod cli;
pub mod error;
pub mod harness;
pub mod linop;
pub mod oracles;
pub mod problem;
pub mod solvers;

pub use error::{Error, Result};
