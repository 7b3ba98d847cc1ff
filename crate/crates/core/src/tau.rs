//! The corner-perturbed tridiagonal Toeplitz matrix `T(n, eps, phi)`.
//!
//! `T` is symmetric with unit off-diagonals, zero interior diagonal, `eps` in
//! the top-left corner and `phi` in the bottom-right corner.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size and corner entries of a tau matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauParams {
    pub n: usize,
    pub eps: f64,
    pub phi: f64,
}

impl TauParams {
    pub fn new(n: usize, eps: f64, phi: f64) -> Result<Self> {
        let params = Self { n, eps, phi };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDimension(format!(
                "tau matrix needs n >= 2, got {}",
                self.n
            )));
        }
        if !self.eps.is_finite() || !self.phi.is_finite() {
            return Err(Error::Domain(format!(
                "corner entries must be finite (eps={}, phi={})",
                self.eps, self.phi
            )));
        }
        Ok(())
    }
}

/// A real symmetric tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SymmetricTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidDimension(format!(
                "diagonal of length {} needs {} off-diagonal entries, got {}",
                diag.len(),
                diag.len().saturating_sub(1),
                offdiag.len()
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n, "vector length must match matrix size");
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// `‖A x − value·x‖₂`.
    pub fn residual_norm(&self, value: f64, x: &[f64]) -> f64 {
        let ax = self.matvec(x);
        norm2_diff_scaled(&ax, x, value)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i][i + 1] = self.offdiag[i];
                a[i + 1][i] = self.offdiag[i];
            }
        }
        a
    }
}

fn norm2_diff_scaled(ax: &[f64], x: &[f64], value: f64) -> f64 {
    ax.iter()
        .zip(x)
        .map(|(a, b)| (a - value * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn build_dense(params: TauParams) -> Result<SymmetricTridiagonal> {
    params.validate()?;
    let n = params.n;
    let mut diag = vec![0.0; n];
    diag[0] = params.eps;
    diag[n - 1] = params.phi;
    Ok(SymmetricTridiagonal {
        diag,
        offdiag: vec![1.0; n - 1],
    })
}

/// Swaps the corners. Conjugating by the anti-diagonal permutation maps
/// `T(n, eps, phi)` onto `T(n, phi, eps)`, so eigenvectors carry over through
/// [`flip_vector`].
pub fn flip_conjugate(params: TauParams) -> TauParams {
    TauParams {
        n: params.n,
        eps: params.phi,
        phi: params.eps,
    }
}

/// Reverses the component order (multiplication by the flip matrix).
pub fn flip_vector(v: &[f64]) -> Vec<f64> {
    v.iter().rev().copied().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// A value/vector pair whose residual is known in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiEigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual_norm: f64,
}

/// The geometric vector anchored at one corner together with its predicted
/// residual.
///
/// For the left corner the vector is `[eps^(1-i)]` and `T v − (eps + 1/eps) v`
/// vanishes except in the last slot, where it equals `eps^(-n) (eps·phi − 1)`.
/// The right corner is the mirror image with `phi`.
pub fn quasi_eigenpair_residual(params: TauParams, side: Side) -> Result<QuasiEigenpair> {
    params.validate()?;
    let n = params.n;
    let (anchor, other) = match side {
        Side::Left => (params.eps, params.phi),
        Side::Right => (params.phi, params.eps),
    };
    if anchor == 0.0 {
        return Err(Error::Domain(format!(
            "{side:?} corner entry is zero; the geometric vector is undefined"
        )));
    }
    let mut vector: Vec<f64> = (0..n).map(|k| anchor.powi(-(k as i32))).collect();
    if side == Side::Right {
        vector.reverse();
    }
    let residual_norm = anchor.abs().powi(-(n as i32)) * (anchor * other - 1.0).abs();
    Ok(QuasiEigenpair {
        value: anchor + anchor.recip(),
        vector,
        residual_norm,
    })
}

/// How many eigenvalues can fall outside `[-2, 2]` and whether `±2` itself is
/// ruled out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutlierBudget {
    pub max_outliers: u8,
    pub pm2_excluded: bool,
}

/// `pm2_excluded` needs a corner of modulus below one and both boundary
/// discriminants away from zero. The corner condition alone is not enough:
/// `T(2, −1.5, 0)` has the eigenvalue `−2`.
pub fn outlier_budget(params: TauParams) -> OutlierBudget {
    use crate::spectral::{boundary_membership, boundary_tolerance, BoundarySign};
    let big_eps = params.eps.abs() > 1.0;
    let big_phi = params.phi.abs() > 1.0;
    let small_corner = params.eps.abs() < 1.0 || params.phi.abs() < 1.0;
    let tol = boundary_tolerance(params.n);
    let off_boundary = [BoundarySign::Plus, BoundarySign::Minus]
        .into_iter()
        .all(|s| boundary_membership(params, s).abs() > tol);
    OutlierBudget {
        max_outliers: u8::from(big_eps) + u8::from(big_phi),
        pm2_excluded: small_corner && off_boundary,
    }
}

/// An eigenvalue counts as an outlier when it lies strictly outside `[-2, 2]`.
pub fn is_outlier(lambda: f64) -> bool {
    lambda.abs() > 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn build_small_examples() {
        let t = build_dense(TauParams::new(2, 2.0, 0.5).unwrap()).unwrap();
        assert_eq!(t.diag, vec![2.0, 0.5]);
        assert_eq!(t.offdiag, vec![1.0]);

        let t = build_dense(TauParams::new(3, 0.0, 0.0).unwrap()).unwrap();
        assert_eq!(t.diag, vec![0.0; 3]);
        assert_eq!(t.offdiag, vec![1.0; 2]);
    }

    #[test]
    fn rejects_tiny_dimension() {
        let bad = TauParams {
            n: 1,
            eps: 0.0,
            phi: 0.0,
        };
        assert!(matches!(build_dense(bad), Err(Error::InvalidDimension(_))));
        assert!(TauParams::new(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn flip_swaps_corners() {
        let p = flip_conjugate(TauParams::new(8, 3.0, 0.5).unwrap());
        assert_eq!((p.n, p.eps, p.phi), (8, 0.5, 3.0));
        let p = flip_conjugate(TauParams::new(5, 1.0, -1.0).unwrap());
        assert_eq!((p.eps, p.phi), (-1.0, 1.0));
        assert_eq!(flip_vector(&[1.0, 2.0, 3.0]), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn quasi_pair_left_table_case() {
        let p = TauParams::new(8, 3.0, 0.5).unwrap();
        let q = quasi_eigenpair_residual(p, Side::Left).unwrap();
        assert_relative_eq!(q.value, 10.0 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(q.residual_norm, 0.5 / 6561.0, max_relative = 1e-15);
        let t = build_dense(p).unwrap();
        assert_relative_eq!(
            t.residual_norm(q.value, &q.vector),
            q.residual_norm,
            max_relative = 1e-12
        );
    }

    #[test]
    fn quasi_pair_three_by_three() {
        let p = TauParams::new(3, 2.0, 0.0).unwrap();
        let q = quasi_eigenpair_residual(p, Side::Left).unwrap();
        assert_eq!(q.value, 2.5);
        assert_eq!(q.vector, vec![1.0, 0.5, 0.25]);
        assert_eq!(q.residual_norm, 0.125);
        let r = build_dense(p).unwrap().matvec(&q.vector);
        // Only the last row misses: 0.5 - 2.5 * 0.25.
        assert_eq!(r[0] - 2.5 * q.vector[0], 0.0);
        assert_eq!(r[1] - 2.5 * q.vector[1], 0.0);
        assert_eq!((r[2] - 2.5 * q.vector[2]).abs(), 0.125);
    }

    #[test]
    fn quasi_pair_right_side_and_exact_case() {
        let p = TauParams::new(6, 0.3, 2.0).unwrap();
        let q = quasi_eigenpair_residual(p, Side::Right).unwrap();
        assert_eq!(q.value, 2.5);
        assert_eq!(q.vector[5], 1.0);
        assert_eq!(q.vector[0], 2.0f64.powi(-5));
        let t = build_dense(p).unwrap();
        assert_relative_eq!(
            t.residual_norm(q.value, &q.vector),
            q.residual_norm,
            max_relative = 1e-12
        );

        let exact = TauParams::new(7, 4.0, 0.25).unwrap();
        let q = quasi_eigenpair_residual(exact, Side::Left).unwrap();
        assert_eq!(q.residual_norm, 0.0);
        assert!(build_dense(exact).unwrap().residual_norm(q.value, &q.vector) < 1e-15);
    }

    #[test]
    fn quasi_pair_zero_corner_is_domain_error() {
        let p = TauParams::new(4, 0.0, 2.0).unwrap();
        assert!(matches!(
            quasi_eigenpair_residual(p, Side::Left),
            Err(Error::Domain(_))
        ));
        assert!(quasi_eigenpair_residual(p, Side::Right).is_ok());
    }

    #[test]
    fn budgets() {
        let b = outlier_budget(TauParams::new(8, 0.5, 0.5).unwrap());
        assert_eq!((b.max_outliers, b.pm2_excluded), (0, true));
        let b = outlier_budget(TauParams::new(8, 3.0, 0.5).unwrap());
        assert_eq!((b.max_outliers, b.pm2_excluded), (1, true));
        let b = outlier_budget(TauParams::new(8, 4.0, -2.0).unwrap());
        assert_eq!((b.max_outliers, b.pm2_excluded), (2, false));
        let b = outlier_budget(TauParams::new(8, 1.0, -1.0).unwrap());
        assert_eq!((b.max_outliers, b.pm2_excluded), (0, false));
        let b = outlier_budget(TauParams::new(2, -1.5, 0.0).unwrap());
        assert_eq!((b.max_outliers, b.pm2_excluded), (1, false));
    }
}
