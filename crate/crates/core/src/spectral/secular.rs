//! Scalar equations whose roots are the eigenvalues of `T(n, eps, phi)`.
//!
//! Inside `(-2, 2)` the eigenvalue is `2cos(theta)` and `theta` solves
//!
//! ```text
//! sin((n+1)θ) − (ε+φ) sin(nθ) + εφ sin((n−1)θ) = 0.
//! ```
//!
//! Above 2 the same identity holds with `sinh` and `λ = 2cosh(θ)`; below −2
//! the corner entries change sign and `λ = −2cosh(θ)`.
//!
//! The hyperbolic residual is returned divided by `sinh(nθ)`. With
//! `x = e^θ` that quotient equals `F(x) / (x (1 − x^(−2n)))` where
//!
//! ```text
//! F(x) = (x − a)(x − b) − x^(−2n) (1 − a x)(1 − b x)
//! ```
//!
//! and `(a, b)` are the corner entries (negated for the lower branch). `F` is
//! evaluated in the factored form `G₊G₋ − d²(1 − x^(−2n) x²)` with
//! `G± = x − m ∓ x^(−n)(1 − m x)`, `m = (a+b)/2`, `d = (a−b)/2`, which keeps
//! the sign reliable even when two outliers are closer than the grid spacing.

use serde::{Deserialize, Serialize};

use super::Branch;
use crate::error::{Error, Result};
use crate::tau::TauParams;

/// Which end of `[-2, 2]` a boundary discriminant refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySign {
    Plus,
    Minus,
}

pub fn secular(params: TauParams, branch: Branch, theta: f64) -> Result<f64> {
    params.validate()?;
    let TauParams { n, eps, phi } = params;
    match branch {
        Branch::Trig => {
            if !(theta > 0.0 && theta < std::f64::consts::PI) {
                return Err(Error::Domain(format!("trig angle {theta} is outside (0, pi)")));
            }
            Ok(trig(n, eps, phi, theta))
        }
        Branch::HyperPos | Branch::HyperNeg => {
            if !(theta > 0.0 && theta.is_finite()) {
                return Err(Error::Domain(format!(
                    "hyperbolic angle {theta} is outside (0, inf)"
                )));
            }
            let (a, b) = side_corners(branch, eps, phi);
            Ok(hyper_scaled(n, a, b, theta))
        }
        Branch::BoundaryPlus | Branch::BoundaryMinus => Err(Error::UnsupportedBranch(branch)),
    }
}

/// Discriminant whose vanishing makes `+2` (plus) or `−2` (minus) an
/// eigenvalue.
pub fn boundary_membership(params: TauParams, sign: BoundarySign) -> f64 {
    let n = params.n as f64;
    let sum = params.eps + params.phi;
    let prod = params.eps * params.phi;
    match sign {
        BoundarySign::Plus => n + 1.0 - sum * n + prod * (n - 1.0),
        BoundarySign::Minus => n + 1.0 + sum * n + prod * (n - 1.0),
    }
}

/// Absolute tolerance under which a boundary discriminant counts as zero.
pub fn boundary_tolerance(n: usize) -> f64 {
    1e-12 * n as f64
}

/// Corner entries seen by the hyperbolic equation of the given branch.
pub(crate) fn side_corners(branch: Branch, eps: f64, phi: f64) -> (f64, f64) {
    match branch {
        Branch::HyperNeg | Branch::BoundaryMinus => (-eps, -phi),
        _ => (eps, phi),
    }
}

pub(crate) fn trig(n: usize, eps: f64, phi: f64, theta: f64) -> f64 {
    let nf = n as f64;
    ((nf + 1.0) * theta).sin() - (eps + phi) * (nf * theta).sin()
        + eps * phi * ((nf - 1.0) * theta).sin()
}

/// Trig residual divided by `sin(θ)`; its limits at 0 and π are the
/// boundary discriminants (the latter up to the sign `(−1)^n`).
pub(crate) fn trig_over_sin(n: usize, eps: f64, phi: f64, theta: f64) -> f64 {
    trig(n, eps, phi, theta) / theta.sin()
}

/// Hyperbolic residual divided by `sinh(nθ)` for corners `(a, b)`.
pub(crate) fn hyper_scaled(n: usize, a: f64, b: f64, theta: f64) -> f64 {
    let nf = n as f64;
    if nf * theta < 1.0 {
        let top = ((nf + 1.0) * theta).sinh() - (a + b) * (nf * theta).sinh()
            + a * b * ((nf - 1.0) * theta).sinh();
        return top / (nf * theta).sinh();
    }
    let x = theta.exp();
    let t = (-nf * theta).exp();
    hyper_f(x, t, a, b) / (x * (1.0 - t * t))
}

/// `F(x)` in factored form, given `t = x^(−n)`.
pub(crate) fn hyper_f(x: f64, t: f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let d = 0.5 * (a - b);
    let (g_plus, g_minus) = hyper_factors(x, t, m);
    g_plus * g_minus - d * d * (1.0 - t * t * x * x)
}

/// `(G₊, G₋)`. With equal corners `F = G₊G₋`. Before the alternating sign
/// of the lower branch is applied, a root of `G₋` gives a mirror-symmetric
/// vector and a root of `G₊` an antisymmetric one.
pub(crate) fn hyper_factors(x: f64, t: f64, m: f64) -> (f64, f64) {
    let base = x - m;
    let tail = t * (1.0 - m * x);
    (base - tail, base + tail)
}
