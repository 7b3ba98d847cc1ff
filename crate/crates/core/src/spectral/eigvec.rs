//! Eigenvector formulas for each branch.
//!
//! Every formula solves the three-term recurrence of `T` with the top-left
//! boundary condition built in; the bottom-right condition holds exactly when
//! the angle is a root of the secular equation. Evaluated in floating point,
//! a formula anchored at one corner can lose accuracy at the far corner, so
//! the solver also evaluates the mirror formula anchored at the other corner
//! and keeps whichever has the smaller residual.

use super::Branch;
use super::secular::side_corners;
use crate::error::{Error, Result};
use crate::tau::{SymmetricTridiagonal, TauParams};

/// Components below this fraction of the largest one are ignored when fixing
/// the sign.
const SIGN_THRESHOLD: f64 = 1e-8;

/// Eigenvector given by the closed-form expression of `branch`, normalized to
/// unit length with its first significant component positive.
pub fn eigvec(params: TauParams, branch: Branch, theta: Option<f64>) -> Result<Vec<f64>> {
    params.validate()?;
    let raw = anchored(params.n, params.eps, branch, theta)?;
    normalize(raw)
}

/// Scales to unit 2-norm and flips the sign so that the first component
/// exceeding `1e-8` of the largest magnitude is positive.
pub fn normalize(mut v: Vec<f64>) -> Result<Vec<f64>> {
    let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(big > 0.0) || !big.is_finite() {
        return Err(Error::DegenerateVector);
    }
    // Pre-scale so squaring cannot overflow or underflow.
    let norm = v.iter().map(|x| (x / big).powi(2)).sum::<f64>().sqrt() * big;
    let lead = v
        .iter()
        .copied()
        .find(|x| x.abs() > SIGN_THRESHOLD * big)
        .unwrap_or(0.0);
    let scale = if lead < 0.0 { -norm } else { norm };
    for x in &mut v {
        *x /= scale;
    }
    Ok(v)
}

/// Raw (unnormalized, possibly rescaled) formula vector anchored at the
/// top-left corner with corner entry `corner`.
pub(crate) fn anchored(n: usize, corner: f64, branch: Branch, theta: Option<f64>) -> Result<Vec<f64>> {
    match branch {
        Branch::Trig => {
            let th = require_theta(branch, theta)?;
            Ok((1..=n)
                .map(|i| {
                    let i = i as f64;
                    (i * th).sin() - corner * ((i - 1.0) * th).sin()
                })
                .collect())
        }
        Branch::HyperPos => Ok(hyperbolic(n, corner, require_theta(branch, theta)?)),
        Branch::HyperNeg => {
            let mut v = hyperbolic(n, -corner, require_theta(branch, theta)?);
            alternate(&mut v);
            Ok(v)
        }
        Branch::BoundaryPlus => Ok((1..=n)
            .map(|i| corner + (1.0 - corner) * i as f64)
            .collect()),
        Branch::BoundaryMinus => {
            let mut v: Vec<f64> = (1..=n)
                .map(|i| -corner + (1.0 + corner) * i as f64)
                .collect();
            alternate(&mut v);
            Ok(v)
        }
    }
}

/// Multiplies component `i` (1-based) by `(−1)^i`.
fn alternate(v: &mut [f64]) {
    for (k, x) in v.iter_mut().enumerate() {
        if k % 2 == 0 {
            *x = -*x;
        }
    }
}

fn require_theta(branch: Branch, theta: Option<f64>) -> Result<f64> {
    match theta {
        Some(t) if t.is_finite() => Ok(t),
        _ => Err(Error::Domain(format!("branch {branch:?} needs a finite angle"))),
    }
}

/// `sinh(iθ) − a sinh((i−1)θ)` up to a positive factor.
///
/// For `nθ ≥ 1` the vector is evaluated as
/// `x^(i−1)(x − a) − x^(−i)(1 − a x)` with `x = e^θ`, with both terms carried
/// in log space and shifted by their common maximum so that nothing
/// overflows.
fn hyperbolic(n: usize, a: f64, theta: f64) -> Vec<f64> {
    let nf = n as f64;
    if nf * theta < 1.0 {
        return (1..=n)
            .map(|i| {
                let i = i as f64;
                (i * theta).sinh() - a * ((i - 1.0) * theta).sinh()
            })
            .collect();
    }
    hyperbolic_x(n, a, theta.exp())
}

pub(crate) fn hyperbolic_x(n: usize, a: f64, x: f64) -> Vec<f64> {
    let log_x = x.ln();
    let grow = x - a;
    let decay = a * x - 1.0;
    let log_grow = if grow != 0.0 { grow.abs().ln() } else { f64::NEG_INFINITY };
    let log_decay = if decay != 0.0 { decay.abs().ln() } else { f64::NEG_INFINITY };
    let shift = (log_grow + (n as f64 - 1.0) * log_x).max(log_decay - log_x);
    (1..=n)
        .map(|i| {
            let i = i as f64;
            let g = if grow != 0.0 {
                grow.signum() * (log_grow + (i - 1.0) * log_x - shift).exp()
            } else {
                0.0
            };
            let d = if decay != 0.0 {
                decay.signum() * (log_decay - i * log_x - shift).exp()
            } else {
                0.0
            };
            g + d
        })
        .collect()
}

/// Normalized eigenvector for an accepted root: the better of the formula
/// anchored at the top-left corner and the mirrored formula anchored at the
/// bottom-right corner.
pub(crate) fn best_vector(
    matrix: &SymmetricTridiagonal,
    params: TauParams,
    branch: Branch,
    theta: Option<f64>,
    lambda: f64,
) -> Result<Vec<f64>> {
    let left = anchored(params.n, params.eps, branch, theta).and_then(normalize);
    let right = anchored(params.n, params.phi, branch, theta)
        .map(|mut v| {
            v.reverse();
            v
        })
        .and_then(normalize);
    match (left, right) {
        (Ok(l), Ok(r)) => {
            let rl = matrix.residual_norm(lambda, &l);
            let rr = matrix.residual_norm(lambda, &r);
            Ok(if rr < rl { r } else { l })
        }
        (Ok(v), Err(_)) | (Err(_), Ok(v)) => Ok(v),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Vector for one member of an unresolvable outlier pair with equal corners.
///
/// `mirror_symmetric` selects the root of `G₋` (true) or `G₊` (false); the
/// symmetric or antisymmetric combination of the anchored formula and its
/// mirror is formed before the alternating sign of the lower branch.
pub(crate) fn paired_vector(
    n: usize,
    corner: f64,
    branch: Branch,
    x: f64,
    mirror_symmetric: bool,
) -> Result<Vec<f64>> {
    let (a, _) = side_corners(branch, corner, corner);
    let base = hyperbolic_x(n, a, x);
    let sign = if mirror_symmetric { 1.0 } else { -1.0 };
    let mut v: Vec<f64> = (0..n).map(|i| base[i] + sign * base[n - 1 - i]).collect();
    if branch == Branch::HyperNeg {
        alternate(&mut v);
    }
    normalize(v)
}
