//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graphs have different vertex counts: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("{what} requires n <= {cap}, got {got}")]
    CapExceeded {
        what: &'static str,
        cap: usize,
        got: usize,
    },

    #[error("invalid vertex pair ({i}, {j}) for n = {n}")]
    InvalidVertex { i: usize, j: usize, n: usize },

    #[error("invalid model spec: {0}")]
    InvalidSpec(String),

    #[error("cycle enumeration budget of {budget} exceeded")]
    EnumerationBudget { budget: usize },

    #[error("probability mass sums to {sum}, outside tolerance {tol}")]
    MassMismatch { sum: f64, tol: f64 },

    #[error("marginals are not probability distributions: {0}")]
    InfeasibleMarginals(String),

    #[error("threshold estimator needs distinct means, got {mean} for both models")]
    DegenerateMeans { mean: f64 },

    #[error("witness '{0}' is not 1-Lipschitz in the edit distance")]
    NotLipschitz(String),

    #[error("solver failed to converge: {0}")]
    Solver(String),

    #[error("malformed edge list: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
