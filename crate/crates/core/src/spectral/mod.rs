//! Eigendecomposition of `T(n, eps, phi)`.
//!
//! Each eigenpair is tagged with the branch that produced it: interior
//! eigenvalues `2cos θ`, outliers `±2cosh θ`, or the endpoints `±2`.

mod closed_form;
mod eigvec;
mod oracle;
mod secular;
mod solve;

use serde::{Deserialize, Serialize};

pub use closed_form::closed_form;
pub use eigvec::{eigvec, normalize};
pub use oracle::{oracle_eigenpairs, oracle_eigs};
pub use secular::{boundary_membership, boundary_tolerance, secular, BoundarySign};
pub use solve::solve;

use crate::tau::{is_outlier, TauParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `λ = 2cos θ`, `θ ∈ (0, π)`.
    Trig,
    /// `λ = 2cosh θ`, `θ > 0`.
    HyperPos,
    /// `λ = −2cosh θ`, `θ > 0`.
    HyperNeg,
    /// `λ = 2`.
    BoundaryPlus,
    /// `λ = −2`.
    BoundaryMinus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    pub branch: Branch,
    pub theta: Option<f64>,
    /// Unit 2-norm, first significant component positive.
    pub vector: Vec<f64>,
}

/// All `n` eigenpairs, sorted by descending eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub params: TauParams,
    pub pairs: Vec<EigenPair>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    pub fn outliers(&self) -> impl Iterator<Item = &EigenPair> {
        self.pairs.iter().filter(|p| is_outlier(p.lambda))
    }
}
