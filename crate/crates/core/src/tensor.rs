//! Tensors over a product lattice, stored flat in lexicographic order with
//! the last axis varying fastest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of a lattice `{1..n_1} × … × {1..n_d}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiIndexSpace {
    pub dims: Vec<usize>,
}

impl MultiIndexSpace {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidDimension(format!(
                "lattice needs at least one axis and no empty axes, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    /// Number of lattice points.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Zero-based flat position of a one-based multi-index.
    pub fn linearize(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.dims.len() {
            return Err(Error::ShapeMismatch {
                expected: self.dims.clone(),
                found: idx.to_vec(),
            });
        }
        let mut flat = 0;
        for (axis, (&i, &n)) in idx.iter().zip(&self.dims).enumerate() {
            if i == 0 || i > n {
                return Err(Error::Domain(format!(
                    "index {i} on axis {} is outside 1..={n}",
                    axis + 1
                )));
            }
            flat = flat * n + (i - 1);
        }
        Ok(flat)
    }

    /// Inverse of [`linearize`](Self::linearize).
    pub fn delinearize(&self, flat: usize) -> Result<Vec<usize>> {
        if flat >= self.len() {
            return Err(Error::Domain(format!(
                "flat index {flat} is outside 0..{}",
                self.len()
            )));
        }
        let mut idx = vec![0; self.dims.len()];
        let mut rest = flat;
        for (slot, &n) in idx.iter_mut().zip(&self.dims).rev() {
            *slot = rest % n + 1;
            rest /= n;
        }
        Ok(idx)
    }
}

/// Nonnegative tensor summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityTensor {
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
}

/// Tolerance used when checking that an input distribution is normalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;

impl ProbabilityTensor {
    /// Checks the shape only; use [`check_normalized`](Self::check_normalized)
    /// for the simplex condition.
    pub fn new(dims: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        check_shape(&dims, values.len())?;
        Ok(Self { dims, values })
    }

    pub fn from_factors(factors: &[Vec<f64>]) -> Self {
        Self {
            dims: factors.iter().map(Vec::len).collect(),
            values: kron_all(factors),
        }
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let sum: f64 = self.values.iter().sum();
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        if (sum - 1.0).abs() > tol || min < -tol || !sum.is_finite() {
            return Err(Error::NotNormalized { sum, min });
        }
        Ok(())
    }
}

/// Real-valued function on the lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffTensor {
    pub dims: Vec<usize>,
    pub values: Vec<f64>,
    pub description: String,
}

impl PayoffTensor {
    pub fn new(dims: Vec<usize>, values: Vec<f64>, description: impl Into<String>) -> Result<Self> {
        check_shape(&dims, values.len())?;
        Ok(Self { dims, values, description: description.into() })
    }
}

fn check_shape(dims: &[usize], len: usize) -> Result<()> {
    let expected: usize = dims.iter().product();
    if dims.is_empty() || expected != len {
        return Err(Error::ShapeMismatch {
            expected: dims.to_vec(),
            found: vec![len],
        });
    }
    Ok(())
}

pub fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn kron_all(factors: &[Vec<f64>]) -> Vec<f64> {
    factors.iter().fold(vec![1.0], |acc, f| kron(&acc, f))
}

/// Number of lattice points before and after `axis` in flat order.
fn outer_inner(dims: &[usize], axis: usize) -> (usize, usize) {
    let outer = dims[..axis].iter().product();
    let inner = dims[axis + 1..].iter().product();
    (outer, inner)
}

/// Applies a dense `n_axis × n_axis` matrix (row-major) along one axis.
pub fn mode_product(dims: &[usize], axis: usize, matrix: &[f64], x: &[f64]) -> Vec<f64> {
    let n = dims[axis];
    debug_assert_eq!(matrix.len(), n * n);
    let (outer, inner) = outer_inner(dims, axis);
    let mut y = vec![0.0; x.len()];
    for o in 0..outer {
        let base = o * n * inner;
        for i in 0..n {
            let row = &matrix[i * n..(i + 1) * n];
            for s in 0..inner {
                let mut acc = 0.0;
                for (j, m) in row.iter().enumerate() {
                    acc += m * x[base + j * inner + s];
                }
                y[base + i * inner + s] = acc;
            }
        }
    }
    y
}

/// Adds `A x` along one axis into `out`, where `A` is tridiagonal with the
/// given sub-, main and super-diagonals.
pub fn mode_tridiagonal_add(
    dims: &[usize],
    axis: usize,
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    x: &[f64],
    out: &mut [f64],
) {
    let n = dims[axis];
    let (outer, inner) = outer_inner(dims, axis);
    for o in 0..outer {
        let base = o * n * inner;
        for i in 0..n {
            for s in 0..inner {
                let at = |k: usize| x[base + k * inner + s];
                let mut acc = diag[i] * at(i);
                if i > 0 {
                    acc += lower[i - 1] * at(i - 1);
                }
                if i + 1 < n {
                    acc += upper[i] * at(i + 1);
                }
                out[base + i * inner + s] += acc;
            }
        }
    }
}
