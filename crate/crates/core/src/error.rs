use thiserror::Error;

use crate::pauli::PauliElement;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix of {rows}x{cols} exceeds the 8x8 cap")]
    DimensionOverflow { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("matrix exponential overflowed the double range")]
    Overflow,
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("matrix is not Hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite (smallest eigenvalue {0:.3e})")]
    NotPositiveDefinite(f64),

    #[error("qubit count mismatch: {0} vs {1}")]
    QubitMismatch(usize, usize),
    #[error("unsupported qubit count {0}; only 1 or 2 are handled")]
    UnsupportedQubits(usize),
    #[error("matrix is not a Pauli group element")]
    NotPauli,
    #[error("element {0} is not contained in the ambient group")]
    NotSubgroup(PauliElement),
    #[error("generator list is empty")]
    EmptyGenerators,

    #[error("degenerate parameters: |omega| = {omega_abs} must exceed |delta| = {delta}")]
    DegenerateParams { delta: f64, omega_abs: f64 },
    #[error("could not normalise <phi0, psi0> to one")]
    NormalizationFailure,
    #[error("cross-check failed for {name}: deviation {deviation:.3e}")]
    CrossCheckFailure { name: String, deviation: f64 },
    #[error("entry {0} is not a Gaussian integer")]
    NonGaussianEntries(String),
    #[error("X-realisation identities need theta = pi/2 and delta = 0 (got theta = {theta}, delta = {delta})")]
    WrongParameterPoint { theta: f64, delta: f64 },

    #[error("evolution overflowed the double range at t = {t}")]
    EvolutionOverflow { t: f64 },
    #[error("time grid must be strictly increasing and start at t >= 0")]
    InvalidTimes,
    #[error("derivative check needs at least 3 uniformly spaced points")]
    GridTooCoarse,

    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
