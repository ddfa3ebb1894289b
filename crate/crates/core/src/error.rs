use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the supported evaluation window.
    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("no sign change of the boundary residual for a in (0, {upper}] (tau = {tau})")]
    Bracketing { tau: f64, upper: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("quadrature produced a non-finite value in {0}")]
    Quadrature(&'static str),

    #[error("Gram matrix is degenerate: every basis direction was dropped")]
    DegenerateGram,

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("perturbation is not in class P: mode {mode} has coefficient {value:e}")]
    NotClassP { mode: usize, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
