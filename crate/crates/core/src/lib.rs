//! Spectral analysis of the tridiagonal Toeplitz family with perturbed
//! corners, and of the birth-death processes whose generators reduce to it.
//!
//! * [`tau`] builds `T(n, eps, phi)` and its structural identities.
//! * [`spectral`] computes eigendecompositions from secular equations, with
//!   closed forms and an independent Sturm-bisection oracle.
//! * [`asymptotics`] compares outliers with their large-`n` predictions.
//! * [`markov`] covers queues, lattice random walks and their tensor
//!   products.
//! * [`diffusion`] discretizes reflected diffusions on the unit cube.
//! * [`wealth`] computes stationary payoff moments and their sensitivities.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod diffusion;
pub mod error;
pub mod markov;
pub mod spectral;
pub mod tau;
pub mod tensor;
pub mod wealth;

pub use error::{Error, Result};
pub use spectral::{Branch, EigenPair, SpectralDecomposition};
pub use tau::{OutlierBudget, SymmetricTridiagonal, TauParams};
pub use tensor::{MultiIndexSpace, PayoffTensor, ProbabilityTensor};
