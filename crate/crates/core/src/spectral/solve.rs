//! Full eigendecomposition by bracketing the secular equations.
//!
//! Interior eigenvalues come from sign changes of the trig residual on a
//! uniform grid in `(δ, π − δ)`. The two end bands are resolved with the
//! residual divided by `sin θ`, whose limits are the boundary discriminants.
//! Outliers come from the two hyperbolic residuals on `(0, θ_max]`. When a
//! side can hold two outliers but the grid shows no sign change, a
//! golden-section search near the grid minimum looks for a dip below zero
//! narrower than the grid spacing.
//!
//! If the roots do not add up to `n`, the grid is refined by a factor of four
//! up to three times.

use std::f64::consts::PI;

use super::eigvec::{best_vector, paired_vector};
use super::secular::{
    boundary_membership, boundary_tolerance, hyper_factors, hyper_scaled, trig_over_sin,
    BoundarySign,
};
use super::{Branch, EigenPair, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::tau::{build_dense, TauParams};

const GRID_PER_ROW: usize = 20;
const MAX_REFINEMENTS: u32 = 3;
const BISECTION_LIMIT: usize = 300;

/// A located root before its eigenvector is formed.
#[derive(Debug, Clone, Copy)]
struct Root {
    branch: Branch,
    theta: Option<f64>,
    /// Set for members of an outlier pair that could only be separated via
    /// the factors of the hyperbolic residual: `Some(true)` for the
    /// mirror-symmetric member.
    paired: Option<bool>,
}

pub fn solve(params: TauParams) -> Result<SpectralDecomposition> {
    params.validate()?;
    let n = params.n;
    let matrix = build_dense(params)?;

    let tol = boundary_tolerance(n);
    let d_plus = boundary_membership(params, BoundarySign::Plus);
    let d_minus = boundary_membership(params, BoundarySign::Minus);
    let has_plus = d_plus.abs() <= tol;
    let has_minus = d_minus.abs() <= tol;

    let mut roots = Vec::new();
    for level in 0..=MAX_REFINEMENTS {
        roots.clear();
        let density = GRID_PER_ROW * n * 4usize.pow(level);
        if has_plus {
            roots.push(Root { branch: Branch::BoundaryPlus, theta: None, paired: None });
        }
        if has_minus {
            roots.push(Root { branch: Branch::BoundaryMinus, theta: None, paired: None });
        }
        roots.extend(trig_roots(params, density, d_plus, d_minus, has_plus, has_minus));
        for branch in [Branch::HyperPos, Branch::HyperNeg] {
            let (d, skip) = if branch == Branch::HyperPos {
                (d_plus, has_plus)
            } else {
                (d_minus, has_minus)
            };
            roots.extend(hyper_roots(params, branch, density, d, skip));
        }
        if roots.len() == n {
            break;
        }
    }

    let mut pairs = Vec::with_capacity(roots.len());
    for root in &roots {
        let lambda = eigenvalue(root.branch, root.theta);
        let vector = match root.paired {
            Some(sym) => paired_vector(
                n,
                params.eps,
                root.branch,
                root.theta.expect("hyperbolic root has an angle").exp(),
                sym,
            )?,
            None => best_vector(&matrix, params, root.branch, root.theta, lambda)?,
        };
        pairs.push(EigenPair { lambda, branch: root.branch, theta: root.theta, vector });
    }
    pairs.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));

    if pairs.len() != n {
        return Err(Error::IncompleteSpectrum { expected: n, pairs });
    }
    Ok(SpectralDecomposition { params, pairs })
}

pub(crate) fn eigenvalue(branch: Branch, theta: Option<f64>) -> f64 {
    match (branch, theta) {
        (Branch::Trig, Some(t)) => 2.0 * t.cos(),
        (Branch::HyperPos, Some(t)) => 2.0 * t.cosh(),
        (Branch::HyperNeg, Some(t)) => -2.0 * t.cosh(),
        (Branch::BoundaryPlus, _) => 2.0,
        (Branch::BoundaryMinus, _) => -2.0,
        _ => f64::NAN,
    }
}

fn trig_roots(
    params: TauParams,
    density: usize,
    d_plus: f64,
    d_minus: f64,
    has_plus: bool,
    has_minus: bool,
) -> Vec<Root> {
    let TauParams { n, eps, phi } = params;
    let g = |t: f64| trig_over_sin(n, eps, phi, t);
    let band = PI / (2.0 * density as f64);
    let first = band;
    let last = PI - band;
    let step = (last - first) / (density - 1) as f64;

    let mut thetas = Vec::new();
    let g_first = g(first);
    if !has_plus && d_plus != 0.0 && g_first != 0.0 && d_plus.signum() != g_first.signum() {
        thetas.push(bisect(g, 0.0, first, d_plus));
    }

    let mut prev: Option<(f64, f64)> = None;
    let mut g_last = g_first;
    for j in 0..density {
        let t = if j + 1 == density { last } else { first + step * j as f64 };
        let v = if j == 0 { g_first } else { g(t) };
        g_last = v;
        if v == 0.0 {
            thetas.push(t);
            prev = None;
            continue;
        }
        if let Some((tp, vp)) = prev {
            if vp.signum() != v.signum() {
                thetas.push(bisect(g, tp, t, vp));
            }
        }
        prev = Some((t, v));
    }

    let at_pi = if n % 2 == 0 { d_minus } else { -d_minus };
    if !has_minus && at_pi != 0.0 && g_last != 0.0 && at_pi.signum() != g_last.signum() {
        thetas.push(bisect(g, last, PI, g_last));
    }

    thetas
        .into_iter()
        .map(|t| Root { branch: Branch::Trig, theta: Some(t), paired: None })
        .collect()
}

fn hyper_roots(
    params: TauParams,
    branch: Branch,
    density: usize,
    discriminant: f64,
    boundary_present: bool,
) -> Vec<Root> {
    let TauParams { n, eps, phi } = params;
    let (a, b) = super::secular::side_corners(branch, eps, phi);
    let s = |t: f64| hyper_scaled(n, a, b, t);
    let theta_max = a.abs().max(1.0).ln().max(b.abs().max(1.0).ln()) + 2.0;
    let step = theta_max / density as f64;

    let mut thetas = Vec::new();
    let values: Vec<f64> = (1..=density).map(|j| s(step * j as f64)).collect();

    // Left end: the scaled residual tends to discriminant / n as θ → 0.
    if !boundary_present
        && discriminant != 0.0
        && values[0] != 0.0
        && discriminant.signum() != values[0].signum()
    {
        thetas.push(bisect(s, 0.0, step, discriminant));
    }
    let mut prev: Option<(f64, f64)> = None;
    for (j, &v) in values.iter().enumerate() {
        let t = step * (j + 1) as f64;
        if v == 0.0 {
            thetas.push(t);
            prev = None;
            continue;
        }
        if let Some((tp, vp)) = prev {
            if vp.signum() != v.signum() {
                thetas.push(bisect(s, tp, t, vp));
            }
        }
        prev = Some((t, v));
    }

    let mut roots: Vec<Root> = thetas
        .iter()
        .map(|&t| Root { branch, theta: Some(t), paired: None })
        .collect();

    if roots.is_empty() && a > 1.0 && b > 1.0 {
        roots.extend(hidden_pair(n, a, b, branch, &values, step));
    }
    roots
}

/// Looks for two roots squeezed between adjacent grid points.
fn hidden_pair(n: usize, a: f64, b: f64, branch: Branch, values: &[f64], step: f64) -> Vec<Root> {
    let s = |t: f64| hyper_scaled(n, a, b, t);
    let (j_min, _) = values
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("grid is never empty");
    let lo = (step * j_min as f64).max(step * 1e-3);
    let hi = step * (j_min + 2) as f64;

    // With equal corners the residual factors into G₊G₋; each factor has a
    // simple root even when the pair coincides in floating point, and the
    // factor identifies the symmetry class of the eigenvector.
    if a == b {
        let nf = n as f64;
        let factor = |t: f64, symmetric: bool| {
            let (gp, gm) = hyper_factors(t.exp(), (-nf * t).exp(), a);
            if symmetric { gm } else { gp }
        };
        let mut out = Vec::new();
        for symmetric in [true, false] {
            let f_lo = factor(lo, symmetric);
            if f_lo.signum() != factor(hi, symmetric).signum() {
                let t = bisect(|t| factor(t, symmetric), lo, hi, f_lo);
                out.push(Root { branch, theta: Some(t), paired: Some(symmetric) });
            }
        }
        return if out.len() == 2 { out } else { Vec::new() };
    }

    let (t_min, v_min) = golden_min(s, lo, hi);
    if v_min < 0.0 {
        let left = bisect(s, lo, t_min, 1.0);
        let right = bisect(s, t_min, hi, v_min);
        return [left, right]
            .into_iter()
            .map(|t| Root { branch, theta: Some(t), paired: None })
            .collect();
    }
    Vec::new()
}

/// Bisection to floating-point resolution. `value_lo` only supplies the sign
/// at `lo`, which lets the caller pass a limit value at an open end.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, value_lo: f64) -> f64 {
    let sign_lo = value_lo.signum();
    for _ in 0..BISECTION_LIMIT {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..BISECTION_LIMIT {
        if !(x1 > lo && x2 < hi && x1 < x2) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 { (x1, f1) } else { (x2, f2) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tau::outlier_budget;
    use approx::assert_relative_eq;

    fn eigenvalues(n: usize, eps: f64, phi: f64) -> Vec<f64> {
        solve(TauParams::new(n, eps, phi).unwrap())
            .unwrap()
            .pairs
            .iter()
            .map(|p| p.lambda)
            .collect()
    }

    #[test]
    fn two_by_two() {
        let ev = eigenvalues(2, 2.0, 0.5);
        assert_relative_eq!(ev[0], 2.5, max_relative = 1e-14);
        assert!(ev[1].abs() < 1e-14);
    }

    #[test]
    fn table_one_outlier() {
        let dec = solve(TauParams::new(8, 3.0, 0.5).unwrap()).unwrap();
        let top = &dec.pairs[0];
        assert_eq!(top.branch, Branch::HyperPos);
        assert!((top.lambda - 3.3333333663723654).abs() <= 1e-14, "{}", top.lambda);
    }

    #[test]
    fn zero_corners() {
        let ev = eigenvalues(5, 0.0, 0.0);
        for (k, l) in ev.iter().enumerate() {
            let expect = 2.0 * ((k + 1) as f64 * PI / 6.0).cos();
            assert!((l - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_corners_include_boundary_eigenvalue() {
        let dec = solve(TauParams::new(6, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(dec.pairs[0].branch, Branch::BoundaryPlus);
        assert_eq!(dec.pairs[0].lambda, 2.0);
        let dec = solve(TauParams::new(6, -1.0, -1.0).unwrap()).unwrap();
        assert_eq!(dec.pairs[5].branch, Branch::BoundaryMinus);
    }

    #[test]
    fn close_pairs_are_resolved() {
        for &(n, c) in &[(32usize, 1.6), (12, 3.0), (64, 1.6), (40, -2.5)] {
            let dec = solve(TauParams::new(n, c, c).unwrap()).unwrap();
            let out = dec.pairs.iter().filter(|p| p.lambda.abs() > 2.0).count();
            assert_eq!(out, 2, "n={n} c={c}");
        }
    }

    #[test]
    fn coincident_pair_in_floating_point_still_gives_n_pairs() {
        let p = TauParams::new(200, 1.6, 1.6).unwrap();
        let dec = solve(p).unwrap();
        assert_eq!(dec.pairs.len(), 200);
        let t = build_dense(p).unwrap();
        let top = &dec.pairs[..2];
        assert!((top[0].lambda - top[1].lambda).abs() <= 1e-15);
        let dot: f64 = top[0].vector.iter().zip(&top[1].vector).map(|(a, b)| a * b).sum();
        assert!(dot.abs() < 1e-12);
        for pair in top {
            assert!(t.residual_norm(pair.lambda, &pair.vector) < 1e-12);
        }
    }

    #[test]
    fn large_dimension_is_complete() {
        let p = TauParams::new(1000, 3.0, -0.4).unwrap();
        let dec = solve(p).unwrap();
        assert_eq!(dec.pairs.len(), 1000);
        assert!(dec.pairs.iter().filter(|q| q.lambda.abs() > 2.0).count()
            <= outlier_budget(p).max_outliers as usize);
    }
}
