//! Dense reference computations shared by the integration tests. Everything
//! here is built directly from matrix entries with nalgebra, independent of
//! the library's tensor and spectral code.
#![allow(dead_code)]

use nalgebra::DMatrix;

pub fn dmatrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, rows.first().map_or(0, Vec::len), |i, j| rows[i][j])
}

/// Dense `T(n, eps, phi)`.
pub fn tau_dense(n: usize, eps: f64, phi: f64) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        t[(i, i + 1)] = 1.0;
        t[(i + 1, i)] = 1.0;
    }
    t[(0, 0)] += eps;
    t[(n - 1, n - 1)] += phi;
    t
}

pub fn sym_eigs_desc(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Eigenvalues of a matrix known to have a real spectrum.
pub fn real_eigs_desc(m: &DMatrix<f64>) -> Vec<f64> {
    let complex = m.clone().complex_eigenvalues();
    let scale = m.amax().max(1.0);
    let mut v: Vec<f64> = complex
        .iter()
        .map(|z| {
            assert!(z.im.abs() <= 1e-8 * scale, "unexpected complex eigenvalue {z}");
            z.re
        })
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Transposed queue generator.
pub fn queue_t_dense(n: usize, up: f64, down: f64) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        q[(i, i + 1)] = up;
        q[(i + 1, i)] = down;
        q[(i, i)] -= up;
        q[(i + 1, i + 1)] -= down;
    }
    q.transpose()
}

pub fn kron_sum(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    let sizes: Vec<usize> = mats.iter().map(|m| m.nrows()).collect();
    let total: usize = sizes.iter().product();
    let mut out = DMatrix::zeros(total, total);
    for (r, m) in mats.iter().enumerate() {
        let mut term = DMatrix::identity(1, 1);
        for (s, &n) in sizes.iter().enumerate() {
            let factor = if s == r { m.clone() } else { DMatrix::identity(n, n) };
            term = term.kronecker(&factor);
        }
        out += term;
    }
    out
}

pub fn kron_prod(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    mats.iter().fold(DMatrix::identity(1, 1), |acc, m| acc.kronecker(m))
}

/// Null vector of a singular matrix, scaled to sum to one.
pub fn null_distribution(m: &DMatrix<f64>) -> Vec<f64> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (k, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let row: Vec<f64> = v_t.row(k).iter().copied().collect();
    let s: f64 = row.iter().sum();
    row.into_iter().map(|x| x / s).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `|a − b| ≤ rel·max(|a|, |b|) + abs`.
pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()) + abs
}

pub fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Stationary law of one axis built straight from the upwind rates.
pub fn reference_axis_law(n: usize, delta: f64, mu: f64, sigma2: f64) -> Vec<f64> {
    let s = sigma2 / (2.0 * delta * delta);
    let (up, down) = if mu >= 0.0 { (s + mu / delta, s) } else { (s, s - mu / delta) };
    let mut p = vec![1.0; n];
    for i in 1..n {
        p[i] = p[i - 1] * up / down;
    }
    let total: f64 = p.iter().sum();
    p.into_iter().map(|v| v / total).collect()
}

/// Mean and variance of `Σ weights[r]·x_r` computed by brute-force
/// enumeration of the product lattice.
pub fn reference_moments(axes: &[(usize, f64, f64, f64)], weights: &[f64]) -> (f64, f64) {
    let laws: Vec<Vec<f64>> = axes.iter().map(|&(n, d, m, s)| reference_axis_law(n, d, m, s)).collect();
    let total: usize = axes.iter().map(|a| a.0).product();
    let (mut m1, mut m2) = (0.0, 0.0);
    for flat in 0..total {
        let mut rest = flat;
        let mut prob = 1.0;
        let mut w = 0.0;
        for r in (0..axes.len()).rev() {
            let n = axes[r].0;
            let i = rest % n;
            rest /= n;
            prob *= laws[r][i];
            w += weights[r] * i as f64 * axes[r].1;
        }
        m1 += prob * w;
        m2 += prob * w * w;
    }
    (m1, m2 - m1 * m1)
}
