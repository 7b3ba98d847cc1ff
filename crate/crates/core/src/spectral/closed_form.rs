//! Spectra that need no root-finding.
//!
//! Two families are covered: corners drawn from `{0, 1, −1}`, where every
//! angle is a rational multiple of π, and positive reciprocal corners
//! (`eps·phi = 1`), where the secular equation factors as
//! `sin(nθ)(2cosθ − eps − 1/eps) = 0`.

use std::f64::consts::PI;

use super::eigvec::{anchored, normalize};
use super::{Branch, EigenPair, SpectralDecomposition};
use crate::tau::TauParams;

/// Tolerance for recognising `eps·phi = 1` in floating point.
const RECIPROCAL_TOL: f64 = 4.0 * f64::EPSILON;

pub fn closed_form(params: TauParams) -> Option<SpectralDecomposition> {
    params.validate().ok()?;
    let TauParams { n, eps, phi } = params;
    let unit = |c: f64| c == 0.0 || c.abs() == 1.0;
    let mut pairs = if unit(eps) && unit(phi) {
        unit_corners(n, eps, phi)
    } else if eps > 0.0 && phi > 0.0 && (eps * phi - 1.0).abs() <= RECIPROCAL_TOL {
        reciprocal_corners(n, eps)
    } else {
        return None;
    };
    pairs.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));
    Some(SpectralDecomposition { params, pairs })
}

fn trig_pair(n: usize, eps: f64, theta: f64) -> EigenPair {
    let raw = anchored(n, eps, Branch::Trig, Some(theta)).expect("angle is finite");
    EigenPair {
        lambda: 2.0 * theta.cos(),
        branch: Branch::Trig,
        theta: Some(theta),
        vector: normalize(raw).expect("interior angles give nonzero vectors"),
    }
}

fn boundary_pair(n: usize, eps: f64, branch: Branch) -> EigenPair {
    let raw = anchored(n, eps, branch, None).expect("boundary formulas need no angle");
    EigenPair {
        lambda: if branch == Branch::BoundaryPlus { 2.0 } else { -2.0 },
        branch,
        theta: None,
        vector: normalize(raw).expect("boundary vectors are nonzero"),
    }
}

fn unit_corners(n: usize, eps: f64, phi: f64) -> Vec<EigenPair> {
    let nf = n as f64;
    let sum = eps + phi;
    let angles: Vec<f64> = if sum == 2.0 {
        return both_one(n);
    } else if sum == -2.0 {
        (1..n).map(|k| k as f64 * PI / nf).collect()
    } else if sum == 0.0 && eps * phi == 0.0 {
        (1..=n).map(|k| k as f64 * PI / (nf + 1.0)).collect()
    } else if sum == 0.0 {
        (1..=n).map(|k| (2 * k - 1) as f64 * PI / (2.0 * nf)).collect()
    } else if sum == 1.0 {
        (1..=n).map(|k| (2 * k - 1) as f64 * PI / (2.0 * nf + 1.0)).collect()
    } else {
        (1..=n).map(|k| (2 * k) as f64 * PI / (2.0 * nf + 1.0)).collect()
    };
    let mut pairs: Vec<EigenPair> = angles.into_iter().map(|t| trig_pair(n, eps, t)).collect();
    if eps == -1.0 && phi == -1.0 {
        pairs.push(boundary_pair(n, eps, Branch::BoundaryMinus));
    }
    pairs
}

/// Both corners equal to one: `λ_k = 2cos(kπ/n)` with `v_i = cos((2i−1)kπ/(2n))`.
fn both_one(n: usize) -> Vec<EigenPair> {
    let nf = n as f64;
    (0..n)
        .map(|k| {
            let theta = k as f64 * PI / nf;
            let raw: Vec<f64> = (1..=n)
                .map(|i| ((2 * i - 1) as f64 * theta / 2.0).cos())
                .collect();
            let vector = normalize(raw).expect("cosine vectors are nonzero");
            if k == 0 {
                EigenPair { lambda: 2.0, branch: Branch::BoundaryPlus, theta: None, vector }
            } else {
                EigenPair { lambda: 2.0 * theta.cos(), branch: Branch::Trig, theta: Some(theta), vector }
            }
        })
        .collect()
}

/// Positive reciprocal corners: trig angles `kπ/n` plus the exact geometric
/// eigenpair `(eps + 1/eps, [eps^(1−i)])`.
pub(crate) fn reciprocal_corners(n: usize, eps: f64) -> Vec<EigenPair> {
    let nf = n as f64;
    let mut pairs: Vec<EigenPair> = (1..n)
        .map(|k| trig_pair(n, eps, k as f64 * PI / nf))
        .collect();

    let log_eps = eps.ln();
    let shift = (-(nf - 1.0) * log_eps).max(0.0);
    let geometric: Vec<f64> = (0..n)
        .map(|k| (-(k as f64) * log_eps - shift).exp())
        .collect();
    let vector = normalize(geometric).expect("geometric vectors are nonzero");
    pairs.push(if eps == 1.0 {
        EigenPair { lambda: 2.0, branch: Branch::BoundaryPlus, theta: None, vector }
    } else {
        EigenPair {
            lambda: eps + eps.recip(),
            branch: Branch::HyperPos,
            theta: Some(log_eps.abs()),
            vector,
        }
    });
    pairs
}
