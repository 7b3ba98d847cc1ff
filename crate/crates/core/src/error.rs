use thiserror::Error;

use crate::spectral::{Branch, EigenPair};

/// Everything that can go wrong inside the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("branch {0:?} has no secular function; use boundary_membership")]
    UnsupportedBranch(Branch),

    #[error("eigenvector formula produced a zero vector")]
    DegenerateVector,

    #[error("incomplete spectrum: found {} of {expected} eigenpairs", pairs.len())]
    IncompleteSpectrum { expected: usize, pairs: Vec<EigenPair> },

    #[error("not symmetrizable: off-diagonal product at position {index} is {product}")]
    NotSymmetrizable { index: usize, product: f64 },

    #[error(
        "ill-posed discretization on axis {axis}: rates ({lambda_tilde}, {mu_tilde}) must be positive{}",
        hint.map(|n| format!("; try n >= {n}")).unwrap_or_default()
    )]
    IllPosed {
        axis: usize,
        lambda_tilde: f64,
        mu_tilde: f64,
        hint: Option<usize>,
    },

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },

    #[error("probability vector is not normalized (sum = {sum}, min = {min})")]
    NotNormalized { sum: f64, min: f64 },

    #[error("no outliers present for n={n}, eps={eps}, phi={phi}")]
    EmptyReport { n: usize, eps: f64, phi: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("resource limit: {requested} values exceed the limit of {limit}")]
    ResourceLimit { requested: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
