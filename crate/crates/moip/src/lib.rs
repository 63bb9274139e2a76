//! Exact multi-objective integer programming over bounded integer variables.
//!
//! The crate provides:
//!
//! - a problem model with exact integer arithmetic, dominance tests, and
//!   non-dominated archives ([`model`]);
//! - reference semantics for ordered, constrained lexicographic subproblems
//!   over explicit vector sets ([`oiplex`]);
//! - an exact single-objective and hierarchical-lexicographic integer solver
//!   ([`ipsolve`]);
//! - the recursive front solver with relaxation reuse ([`recursion`]), its
//!   slab-parallel variant ([`epp`]), and the permutation-sharing parallel
//!   engine with a live bounds board ([`sharing`]);
//! - seeded generators for knapsack, assignment, and traveling-salesman
//!   benchmark families ([`instgen`]), text serialization ([`fileio`]), and a
//!   guarded brute-force oracle ([`oracle`]).

pub mod epp;
pub mod fileio;
#[cfg(test)]
pub(crate) mod testutil;
pub mod instgen;
pub mod ipsolve;
pub mod model;
pub mod oiplex;
pub mod oracle;
pub mod recursion;
pub mod rng;
pub mod sharing;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Invalid(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("time limit exceeded")]
    Timeout,

    #[error("search space too large for enumeration: {0}")]
    OracleGuard(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
