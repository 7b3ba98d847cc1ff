//! Large-`n` predictions for outliers and a validation report comparing them
//! with the solver.
//!
//! A corner entry `c` with `|c| > 1` attracts one outlier towards `c + 1/c`,
//! and its eigenvector approaches the geometric vector decaying away from
//! that corner. With equal corners the two outliers share a limit and their
//! eigenvectors split into a mirror-symmetric and an antisymmetric one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::solve;
use crate::tau::{flip_vector, TauParams};

/// Limits `c + 1/c` for each corner with modulus above one (a single value
/// when the corners coincide).
pub fn predicted_outliers(params: TauParams) -> Vec<f64> {
    let mut out = Vec::new();
    if params.eps.abs() > 1.0 {
        out.push(params.eps + params.eps.recip());
    }
    if params.phi.abs() > 1.0 && params.phi != params.eps {
        out.push(params.phi + params.phi.recip());
    }
    out
}

/// Distance from `x` to the line spanned by `u`.
pub fn projection_residual(x: &[f64], u: &[f64]) -> Result<f64> {
    if x.len() != u.len() {
        return Err(Error::ShapeMismatch { expected: vec![u.len()], found: vec![x.len()] });
    }
    let uu: f64 = u.iter().map(|v| v * v).sum();
    if !(uu > 0.0) {
        return Err(Error::Domain("cannot project onto the zero vector".into()));
    }
    let coef = x.iter().zip(u).map(|(a, b)| a * b).sum::<f64>() / uu;
    Ok(x.iter()
        .zip(u)
        .map(|(a, b)| (a - coef * b).powi(2))
        .sum::<f64>()
        .sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    Symmetric,
    Antisymmetric,
    Neither,
}

/// Classifies `x` under reversal of its components, with relative tolerance
/// `1e-8`.
pub fn symmetry_class(x: &[f64]) -> Result<SymmetryClass> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Domain("symmetry of the zero vector is undefined".into()));
    }
    let flipped = flip_vector(x);
    let dist = |sign: f64| {
        x.iter()
            .zip(&flipped)
            .map(|(a, b)| (b - sign * a).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    Ok(if dist(1.0) <= 1e-8 * norm {
        SymmetryClass::Symmetric
    } else if dist(-1.0) <= 1e-8 * norm {
        SymmetryClass::Antisymmetric
    } else {
        SymmetryClass::Neither
    })
}

/// Reference direction an outlier eigenvector is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionTarget {
    /// `[eps^(1−i)]`, anchored at the top-left corner.
    Left,
    /// `[phi^(i−n)]`, anchored at the bottom-right corner.
    Right,
    /// Sum of the two.
    Sum,
    /// Difference of the two.
    Difference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierEntry {
    /// `"mu"` for the outlier attached to `eps` (or the symmetric member of
    /// an equal-corner pair), `"nu"` for the other.
    pub label: String,
    pub predicted: f64,
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub abs_error: f64,
    pub projection_residual: f64,
    pub target: ProjectionTarget,
    pub symmetry: SymmetryClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierReport {
    pub params: TauParams,
    pub predicted: Vec<f64>,
    pub entries: Vec<OutlierEntry>,
}

impl OutlierReport {
    pub fn computed(&self) -> Vec<(f64, &[f64])> {
        self.entries.iter().map(|e| (e.lambda, e.vector.as_slice())).collect()
    }

    pub fn abs_errors(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.abs_error).collect()
    }

    pub fn projection_residuals(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.projection_residual).collect()
    }

    pub fn entry(&self, label: &str) -> Option<&OutlierEntry> {
        self.entries.iter().find(|e| e.label == label)
    }
}

fn geometric_left(params: TauParams) -> Vec<f64> {
    (0..params.n).map(|k| params.eps.powi(-(k as i32))).collect()
}

fn geometric_right(params: TauParams) -> Vec<f64> {
    (1..=params.n)
        .map(|i| params.phi.powi(i as i32 - params.n as i32))
        .collect()
}

/// Solves for the outliers and pairs each with its prediction.
///
/// Distinct corners: the outlier nearest `eps + 1/eps` is `mu` (compared
/// with the left geometric vector), the one nearest `phi + 1/phi` is `nu`
/// (compared with the right one). Equal corners: `mu` is the outlier closest
/// to the span of the sum of the two geometric vectors and `nu` is compared
/// with their difference.
pub fn validation_row(params: TauParams) -> Result<OutlierReport> {
    params.validate()?;
    let empty = || Error::EmptyReport { n: params.n, eps: params.eps, phi: params.phi };
    let predicted = predicted_outliers(params);
    if predicted.is_empty() {
        return Err(empty());
    }
    let dec = solve(params)?;
    let mut outliers: Vec<(f64, Vec<f64>)> =
        dec.outliers().map(|p| (p.lambda, p.vector.clone())).collect();
    if outliers.is_empty() {
        return Err(empty());
    }

    let left = geometric_left(params);
    let right = geometric_right(params);
    let mut entries = Vec::new();
    let mut push = |label: &str, predicted: f64, (lambda, vector): (f64, Vec<f64>), target, reference: &[f64]| -> Result<()> {
        entries.push(OutlierEntry {
            label: label.to_string(),
            predicted,
            lambda,
            abs_error: (lambda - predicted).abs(),
            projection_residual: projection_residual(&vector, reference)?,
            target,
            symmetry: symmetry_class(&vector)?,
            vector,
        });
        Ok(())
    };

    if params.eps == params.phi {
        let sum: Vec<f64> = left.iter().zip(&right).map(|(a, b)| a + b).collect();
        let diff: Vec<f64> = left.iter().zip(&right).map(|(a, b)| a - b).collect();
        let mut scored = Vec::new();
        for o in outliers {
            let r = projection_residual(&o.1, &sum)?;
            let class = symmetry_class(&o.1)?;
            scored.push((r, class, o));
        }
        // Smallest residual against the sum first; symmetric breaks ties.
        scored.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then_with(|| (b.1 == SymmetryClass::Symmetric).cmp(&(a.1 == SymmetryClass::Symmetric)))
        });
        let mut it = scored.into_iter();
        if let Some((_, _, o)) = it.next() {
            push("mu", predicted[0], o, ProjectionTarget::Sum, &sum)?;
        }
        if let Some((_, _, o)) = it.next() {
            push("nu", predicted[0], o, ProjectionTarget::Difference, &diff)?;
        }
    } else {
        let sides = [
            (params.eps.abs() > 1.0, params.eps, "mu", ProjectionTarget::Left, &left),
            (params.phi.abs() > 1.0, params.phi, "nu", ProjectionTarget::Right, &right),
        ];
        for (active, corner, label, target, reference) in sides {
            if !active || outliers.is_empty() {
                continue;
            }
            let limit = corner + corner.recip();
            let pick = outliers
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 .0 - limit).abs().total_cmp(&(b.1 .0 - limit).abs()))
                .map(|(i, _)| i)
                .expect("outlier list is non-empty");
            let o = outliers.remove(pick);
            push(label, limit, o, target, reference)?;
        }
    }

    Ok(OutlierReport { params, predicted, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, eps: f64, phi: f64) -> TauParams {
        TauParams::new(n, eps, phi).unwrap()
    }

    #[test]
    fn predictions() {
        assert_eq!(predicted_outliers(p(8, 3.0, 0.5)), vec![3.0 + 1.0 / 3.0]);
        assert_eq!(predicted_outliers(p(8, 4.0, -2.0)), vec![4.25, -2.5]);
        assert!(predicted_outliers(p(8, 0.5, 0.9)).is_empty());
        assert_eq!(predicted_outliers(p(8, 1.6, 1.6)).len(), 1);
    }

    #[test]
    fn projection_examples() {
        let u = [1.0, 2.0, 3.0];
        assert!(projection_residual(&u, &u).unwrap() < 1e-15);
        assert!((projection_residual(&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(projection_residual(&u, &[0.0; 3]).is_err());
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(symmetry_class(&[1.0, 2.0, 1.0]).unwrap(), SymmetryClass::Symmetric);
        assert_eq!(symmetry_class(&[1.0, 0.0, -1.0]).unwrap(), SymmetryClass::Antisymmetric);
        assert_eq!(symmetry_class(&[1.0, 2.0, 3.0]).unwrap(), SymmetryClass::Neither);
        assert!(symmetry_class(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn table_one_row() {
        let r = validation_row(p(8, 3.0, 0.5)).unwrap();
        assert_eq!(r.entries.len(), 1);
        let mu = r.entry("mu").unwrap();
        assert!((mu.abs_error - 3.3e-8).abs() < 0.1e-8, "{}", mu.abs_error);
        assert!((mu.projection_residual - 3.0e-5).abs() < 0.5e-5, "{}", mu.projection_residual);
    }

    #[test]
    fn equal_corners_split_by_symmetry() {
        let r = validation_row(p(16, 1.6, 1.6)).unwrap();
        assert_eq!(r.entry("mu").unwrap().symmetry, SymmetryClass::Symmetric);
        assert_eq!(r.entry("nu").unwrap().symmetry, SymmetryClass::Antisymmetric);
    }

    #[test]
    fn no_outliers_is_an_error() {
        assert!(matches!(validation_row(p(8, 0.5, 0.2)), Err(Error::EmptyReport { .. })));
    }
}
