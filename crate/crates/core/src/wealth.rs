//! Moments of a payoff under the stationary distribution of a diffusion and
//! their derivatives with respect to each axis's drift and variance.
//!
//! The stationary law factorizes over axes, so a derivative with respect to
//! a parameter of axis `r` replaces the `r`-th factor by its derivative and
//! leaves the others in place.

use serde::{Deserialize, Serialize};

use crate::diffusion::{axis_rates, diffusion_steady_state, DiffusionAxis, DiffusionSpec};
use crate::error::{Error, Result};
use crate::markov::geometric_distribution;
use crate::tensor::{kron_all, PayoffTensor, ProbabilityTensor, NORMALIZATION_TOL};

/// `W(x) = Σ_r weights[r]·x_r` on the lattice nodes.
pub fn linear_payoff(spec: &DiffusionSpec, weights: &[f64]) -> Result<PayoffTensor> {
    spec.validate()?;
    if weights.len() != spec.axes.len() {
        return Err(Error::ShapeMismatch { expected: vec![spec.axes.len()], found: vec![weights.len()] });
    }
    let mut values = vec![0.0];
    for (axis, w) in spec.axes.iter().zip(weights) {
        let coords = axis.coordinates();
        values = values
            .iter()
            .flat_map(|&acc| coords.iter().map(move |x| acc + w * x))
            .collect();
    }
    let terms: Vec<String> = weights.iter().enumerate().map(|(r, w)| format!("{w}*x{}", r + 1)).collect();
    PayoffTensor::new(spec.dims(), values, format!("linear: {}", terms.join(" + ")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
}

pub fn payoff_moments(payoff: &PayoffTensor, p: &ProbabilityTensor) -> Result<MomentReport> {
    if payoff.dims != p.dims {
        return Err(Error::ShapeMismatch { expected: payoff.dims.clone(), found: p.dims.clone() });
    }
    p.check_normalized(NORMALIZATION_TOL)?;
    let mean = dot(&payoff.values, &p.values);
    let second: f64 = payoff.values.iter().zip(&p.values).map(|(w, q)| w * w * q).sum();
    Ok(MomentReport { mean, variance: second - mean * mean })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Derivatives of the rate ratio of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoDerivatives {
    pub drho_dmu: f64,
    pub drho_dsigma2: f64,
}

/// With `ρ = λ̃/μ̃`: `dρ/dμ` is `2Δσ²/(σ²−2Δμ)²` for negative drift and
/// `2Δ/σ²` otherwise, while `dρ/dσ² = −μ/(2Δ³μ̃²)` holds on both sides once
/// `μ̃` is taken from the matching branch.
pub fn rho_derivatives(axis: &DiffusionAxis) -> Result<RhoDerivatives> {
    let rates = axis_rates(axis)?;
    let DiffusionAxis { delta, mu, sigma2, .. } = *axis;
    let drho_dmu = if mu < 0.0 {
        let denom = sigma2 - 2.0 * delta * mu;
        2.0 * delta * sigma2 / (denom * denom)
    } else {
        2.0 * delta / sigma2
    };
    let drho_dsigma2 = -mu / (2.0 * delta.powi(3) * rates.down * rates.down);
    Ok(RhoDerivatives { drho_dmu, drho_dsigma2 })
}

/// `d/dρ` of the normalized geometric distribution on `n` points.
///
/// For `ρ < 1` the quotient rule is applied to `ρ^(i−1)/Σρ^j`. This equals
/// `c'(ρ)ρ^(i−1) + c(ρ)(i−1)ρ^(i−2)` with `c = (1−ρ)/(1−ρⁿ)`, but that
/// expanded form divides by `(1−ρⁿ)²` and loses about `eps/(1−ρ)²` near one.
/// Within `1e-8` of one the first-order limit `(2i−n−1)/(2n)` is returned.
/// Ratios above one are mapped to `1/ρ` by reversing the lattice so that
/// powers stay bounded.
pub fn stationary_derivative(n: usize, rho: f64) -> Vec<f64> {
    if (rho - 1.0).abs() <= 1e-8 {
        let nf = n as f64;
        return (1..=n).map(|i| (2.0 * i as f64 - nf - 1.0) / (2.0 * nf)).collect();
    }
    if rho > 1.0 {
        let inv = rho.recip();
        let mut d = stationary_derivative(n, inv);
        d.reverse();
        for v in &mut d {
            *v *= -inv * inv;
        }
        return d;
    }
    let mut powers = Vec::with_capacity(n);
    let mut pw = 1.0;
    for _ in 0..n {
        powers.push(pw);
        pw *= rho;
    }
    let s: f64 = powers.iter().sum();
    let ds: f64 = (1..n).map(|j| j as f64 * powers[j - 1]).sum();
    (0..n)
        .map(|k| {
            let lead = if k > 0 { k as f64 * powers[k - 1] } else { 0.0 };
            (lead * s - powers[k] * ds) / (s * s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSensitivity {
    pub dmean_dmu: f64,
    pub dmean_dsigma2: f64,
    pub dvar_dmu: f64,
    pub dvar_dsigma2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dp_dmu: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dp_dsigma2: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub moments: MomentReport,
    pub axes: Vec<AxisSensitivity>,
}

pub fn stationary_sensitivities(spec: &DiffusionSpec, payoff: &PayoffTensor) -> Result<SensitivityReport> {
    sensitivities(spec, payoff, false)
}

/// Same as [`stationary_sensitivities`], also returning the derivative
/// tensors of the stationary distribution.
pub fn stationary_sensitivities_with_tensors(spec: &DiffusionSpec, payoff: &PayoffTensor) -> Result<SensitivityReport> {
    sensitivities(spec, payoff, true)
}

fn sensitivities(spec: &DiffusionSpec, payoff: &PayoffTensor, keep_tensors: bool) -> Result<SensitivityReport> {
    spec.validate()?;
    if payoff.dims != spec.dims() {
        return Err(Error::ShapeMismatch { expected: spec.dims(), found: payoff.dims.clone() });
    }
    let mut factors = Vec::with_capacity(spec.axes.len());
    let mut slopes = Vec::with_capacity(spec.axes.len());
    for axis in &spec.axes {
        let rates = axis_rates(axis)?;
        factors.push(geometric_distribution(axis.n, rates.ratio));
        slopes.push(stationary_derivative(axis.n, rates.ratio));
    }
    let p = ProbabilityTensor::from_factors(&factors);
    let moments = payoff_moments(payoff, &p)?;
    let squared: Vec<f64> = payoff.values.iter().map(|w| w * w).collect();

    let mut axes = Vec::with_capacity(spec.axes.len());
    for (r, axis) in spec.axes.iter().enumerate() {
        let rho = rho_derivatives(axis)?;
        let mut replaced = factors.clone();
        replaced[r] = slopes[r].clone();
        // Derivative of the stationary tensor with respect to the ratio.
        let dp_drho = kron_all(&replaced);
        let dmean = dot(&payoff.values, &dp_drho);
        let dvar = dot(&squared, &dp_drho) - 2.0 * moments.mean * dmean;
        let scaled = |c: f64| keep_tensors.then(|| dp_drho.iter().map(|v| v * c).collect());
        axes.push(AxisSensitivity {
            dmean_dmu: dmean * rho.drho_dmu,
            dmean_dsigma2: dmean * rho.drho_dsigma2,
            dvar_dmu: dvar * rho.drho_dmu,
            dvar_dsigma2: dvar * rho.drho_dsigma2,
            dp_dmu: scaled(rho.drho_dmu),
            dp_dsigma2: scaled(rho.drho_dsigma2),
        });
    }
    Ok(SensitivityReport { moments, axes })
}

/// Parameter varied by [`comparative_sweep`], with a zero-based axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Mu(usize),
    Sigma2(usize),
}

impl SweepTarget {
    /// Column label such as `mu_1` (one-based axis).
    pub fn name(&self) -> String {
        match self {
            SweepTarget::Mu(r) => format!("mu_{}", r + 1),
            SweepTarget::Sigma2(r) => format!("sigma2_{}", r + 1),
        }
    }

    fn axis(&self) -> usize {
        match self {
            SweepTarget::Mu(r) | SweepTarget::Sigma2(r) => *r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    /// Absent when this grid value gives an invalid discretization.
    pub result: Option<SensitivityReport>,
    pub error: Option<String>,
}

/// One row per grid value. Each row starts from a copy of `spec`; rows whose
/// parameter value is invalid carry the error message instead of results.
pub fn comparative_sweep(
    spec: &DiffusionSpec,
    payoff: &PayoffTensor,
    target: SweepTarget,
    grid: &[f64],
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    if target.axis() >= spec.axes.len() {
        return Err(Error::Domain(format!(
            "sweep axis {} does not exist; the diffusion has {} axes",
            target.axis() + 1,
            spec.axes.len()
        )));
    }
    Ok(grid
        .iter()
        .map(|&value| {
            let mut varied = spec.clone();
            match target {
                SweepTarget::Mu(r) => varied.axes[r].mu = value,
                SweepTarget::Sigma2(r) => varied.axes[r].sigma2 = value,
            }
            let (result, error) = match stationary_sensitivities(&varied, payoff) {
                Ok(report) => (Some(report), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepRow { parameter: target.name(), value, result, error }
        })
        .collect())
}

/// Mean and variance at the analytic steady state of `spec`.
pub fn stationary_moments(spec: &DiffusionSpec, payoff: &PayoffTensor) -> Result<MomentReport> {
    let p = diffusion_steady_state(spec)?;
    payoff_moments(payoff, &p)
}
