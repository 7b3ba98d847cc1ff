//! Reference eigensolver that shares no code with the secular equations.
//!
//! Eigenvalues come from Sturm-sequence bisection (counting negative pivots
//! of `A − xI`); eigenvectors from inverse iteration with a pivoted
//! tridiagonal factorization.

use crate::error::{Error, Result};
use crate::tau::SymmetricTridiagonal;

/// Eigenvalues in descending order.
pub fn oracle_eigs(matrix: &SymmetricTridiagonal) -> Result<Vec<f64>> {
    check(matrix)?;
    let n = matrix.dim();
    let (lo, hi) = gershgorin(matrix);
    // k counts eigenvalues from the bottom; reverse for descending order.
    Ok((0..n).rev().map(|k| kth_eigenvalue(matrix, k, lo, hi)).collect())
}

/// Eigenpairs in descending order of eigenvalue, vectors normalized to unit
/// length with the first significant component positive.
pub fn oracle_eigenpairs(matrix: &SymmetricTridiagonal) -> Result<Vec<(f64, Vec<f64>)>> {
    let values = oracle_eigs(matrix)?;
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(values.len());
    for &value in &values {
        let cluster: Vec<&Vec<f64>> = out
            .iter()
            .filter(|(v, _)| (v - value).abs() <= 1e-6 * scale)
            .map(|(_, x)| x)
            .collect();
        let x = inverse_iteration(matrix, value, &cluster, scale)?;
        out.push((value, x));
    }
    Ok(out)
}

fn check(matrix: &SymmetricTridiagonal) -> Result<()> {
    if matrix.dim() == 0 || matrix.offdiag.len() + 1 != matrix.dim() {
        return Err(Error::InvalidDimension(format!(
            "tridiagonal with {} diagonal and {} off-diagonal entries",
            matrix.diag.len(),
            matrix.offdiag.len()
        )));
    }
    Ok(())
}

fn gershgorin(m: &SymmetricTridiagonal) -> (f64, f64) {
    let n = m.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += m.offdiag[i - 1].abs();
        }
        if i + 1 < n {
            r += m.offdiag[i].abs();
        }
        lo = lo.min(m.diag[i] - r);
        hi = hi.max(m.diag[i] + r);
    }
    let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    (lo - pad, hi + pad)
}

/// Number of eigenvalues strictly below `x`.
fn count_below(m: &SymmetricTridiagonal, x: f64) -> usize {
    let b_max = m.offdiag.iter().fold(1.0f64, |a, b| a.max(b * b));
    let pivot_floor = f64::MIN_POSITIVE * b_max;
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..m.dim() {
        d = if i == 0 {
            m.diag[0] - x
        } else {
            m.diag[i] - x - m.offdiag[i - 1] * m.offdiag[i - 1] / d
        };
        if d.abs() < pivot_floor {
            d = -pivot_floor;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k`-th smallest eigenvalue (0-based).
fn kth_eigenvalue(m: &SymmetricTridiagonal, k: usize, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if count_below(m, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

fn inverse_iteration(
    m: &SymmetricTridiagonal,
    shift: f64,
    cluster: &[&Vec<f64>],
    scale: f64,
) -> Result<Vec<f64>> {
    let n = m.dim();
    let lu = PivotedLu::factor(m, shift, f64::EPSILON * scale);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.25 * ((i as f64) * 0.7 + 0.3).sin()).collect();
    for _ in 0..4 {
        for v in cluster {
            let dot: f64 = x.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            for (a, b) in x.iter_mut().zip(v.iter()) {
                *a -= dot * b;
            }
        }
        x = lu.solve(&x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::DegenerateVector);
        }
        for v in &mut x {
            *v /= norm;
        }
    }
    for v in cluster {
        let dot: f64 = x.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        for (a, b) in x.iter_mut().zip(v.iter()) {
            *a -= dot * b;
        }
    }
    super::eigvec::normalize(x)
}

/// LU factorization of `A − σI` with partial pivoting; `U` has two
/// super-diagonals.
struct PivotedLu {
    lower: Vec<f64>,
    d: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedLu {
    fn factor(m: &SymmetricTridiagonal, shift: f64, tiny: f64) -> Self {
        let n = m.dim();
        let mut d: Vec<f64> = m.diag.iter().map(|a| a - shift).collect();
        let mut lower = m.offdiag.clone();
        let mut u1 = m.offdiag.clone();
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= lower[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = lower[i] / d[i];
                lower[i] = f;
                d[i + 1] -= f * u1[i];
            } else {
                swapped[i] = true;
                let f = d[i] / lower[i];
                d[i] = lower[i];
                lower[i] = f;
                let upper = u1[i];
                u1[i] = d[i + 1];
                d[i + 1] = upper - f * d[i + 1];
                if i + 2 < n {
                    u2[i] = u1[i + 1];
                    u1[i + 1] *= -f;
                }
            }
        }
        if let Some(last) = d.last_mut() {
            if *last == 0.0 {
                *last = tiny;
            }
        }
        for v in &mut d {
            if v.abs() < tiny {
                *v = if *v < 0.0 { -tiny } else { tiny };
            }
        }
        Self { lower, d, u1, u2, swapped }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut y = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.lower[i] * y[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            if i + 1 < n {
                acc -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * x[i + 2];
            }
            x[i] = acc / self.d[i];
        }
        x
    }
}
