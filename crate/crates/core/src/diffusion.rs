//! Reflected Brownian motion with constant drift on a uniform grid, one
//! independent coordinate per axis. Each axis discretizes to a queue whose
//! rates come from an upwind drift term plus a three-point Laplacian, and
//! the full generator is the Kronecker sum of the axis generators.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::{
    geometric_distribution, kron_spectrum_with_limit, queue_generator, transient_evolve, AxisParams,
    BirthDeathParams, Evolution, SpectrumKind, SpectrumReport, Tridiagonal, DEFAULT_STATE_LIMIT,
};
use crate::tensor::{mode_tridiagonal_add, MultiIndexSpace, ProbabilityTensor};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionAxis {
    pub n: usize,
    /// Grid step.
    pub delta: f64,
    /// Drift.
    pub mu: f64,
    /// Variance per unit time.
    pub sigma2: f64,
}

impl DiffusionAxis {
    /// Axis over `[0, 1]` with step `1/(n−1)`.
    pub fn new(n: usize, mu: f64, sigma2: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(format!("axis needs n >= 2, got {n}")));
        }
        Self::with_delta(n, 1.0 / (n as f64 - 1.0), mu, sigma2)
    }

    pub fn with_delta(n: usize, delta: f64, mu: f64, sigma2: f64) -> Result<Self> {
        let axis = Self { n, delta, mu, sigma2 };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDimension(format!("axis needs n >= 2, got {}", self.n)));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Domain(format!("grid step must be positive, got {}", self.delta)));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::Domain(format!("variance must be positive, got {}", self.sigma2)));
        }
        if !self.mu.is_finite() {
            return Err(Error::Domain(format!("drift must be finite, got {}", self.mu)));
        }
        Ok(())
    }

    /// Node positions `(i−1)Δ`.
    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n).map(|i| i as f64 * self.delta).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSpec {
    pub axes: Vec<DiffusionAxis>,
}

impl DiffusionSpec {
    pub fn new(axes: Vec<DiffusionAxis>) -> Result<Self> {
        let spec = Self { axes };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::InvalidDimension("diffusion needs at least one axis".into()));
        }
        self.axes.iter().try_for_each(DiffusionAxis::validate)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n).collect()
    }

    pub fn space(&self) -> MultiIndexSpace {
        MultiIndexSpace { dims: self.dims() }
    }
}

/// Up-rate, down-rate and their ratio for one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRates {
    pub up: f64,
    pub down: f64,
    pub ratio: f64,
}

/// Upwind rates: the drift enlarges the rate in its own direction by
/// `|μ|/Δ`, on top of the diffusive rate `σ²/(2Δ²)` in both directions.
/// Zero drift takes the nonnegative-drift branch.
pub fn axis_rates(axis: &DiffusionAxis) -> Result<AxisRates> {
    axis.validate()?;
    let diffusive = axis.sigma2 / (2.0 * axis.delta * axis.delta);
    let advective = axis.mu / axis.delta;
    let (up, down) = if axis.mu >= 0.0 {
        (diffusive + advective, diffusive)
    } else {
        (diffusive, diffusive - advective)
    };
    if !(up > 0.0 && down > 0.0 && up.is_finite() && down.is_finite()) {
        return Err(Error::IllPosed { axis: 0, lambda_tilde: up, mu_tilde: down, hint: None });
    }
    Ok(AxisRates { up, down, ratio: up / down })
}

fn axis_queue(axis: &DiffusionAxis, index: usize) -> Result<BirthDeathParams> {
    let rates = axis_rates(axis).map_err(|e| match e {
        Error::IllPosed { lambda_tilde, mu_tilde, hint, .. } => {
            Error::IllPosed { axis: index, lambda_tilde, mu_tilde, hint }
        }
        other => other,
    })?;
    BirthDeathParams::new(axis.n, rates.up, rates.down)
}

/// The queue generator with the upwind rates of this axis.
pub fn axis_generator(axis: &DiffusionAxis) -> Result<Tridiagonal> {
    queue_generator(axis_queue(axis, 0)?)
}

/// Upwind drift part of the axis generator: a one-sided difference in the
/// direction of the drift, with the boundary row that would leave the grid
/// set to zero.
pub fn drift_matrix(axis: &DiffusionAxis) -> Result<Tridiagonal> {
    axis.validate()?;
    let n = axis.n;
    let rate = axis.mu.abs() / axis.delta;
    let mut m = Tridiagonal { lower: vec![0.0; n - 1], diag: vec![-rate; n], upper: vec![0.0; n - 1] };
    if axis.mu >= 0.0 {
        m.upper.fill(rate);
        m.diag[n - 1] = 0.0;
    } else {
        m.lower.fill(rate);
        m.diag[0] = 0.0;
    }
    Ok(m)
}

/// Diffusive part: `σ²/(2Δ²)` times the reflecting second-difference matrix.
pub fn diffusion_matrix(axis: &DiffusionAxis) -> Result<Tridiagonal> {
    axis.validate()?;
    let n = axis.n;
    let rate = axis.sigma2 / (2.0 * axis.delta * axis.delta);
    let mut diag = vec![-2.0 * rate; n];
    diag[0] = -rate;
    diag[n - 1] = -rate;
    Ok(Tridiagonal { lower: vec![rate; n - 1], diag, upper: vec![rate; n - 1] })
}

/// `L x` (or `Lᵀ x`) for the Kronecker-sum generator, one axis at a time.
pub fn generator_apply(spec: &DiffusionSpec, x: &[f64], transpose: bool) -> Result<Vec<f64>> {
    spec.validate()?;
    let dims = spec.dims();
    let total: usize = dims.iter().product();
    if x.len() != total {
        return Err(Error::ShapeMismatch { expected: dims, found: vec![x.len()] });
    }
    let mut out = vec![0.0; total];
    for (r, axis) in spec.axes.iter().enumerate() {
        let mut g = queue_generator(axis_queue(axis, r)?)?;
        if transpose {
            g = g.transpose();
        }
        mode_tridiagonal_add(&dims, r, &g.lower, &g.diag, &g.upper, x, &mut out);
    }
    Ok(out)
}

fn queue_axes(spec: &DiffusionSpec) -> Result<Vec<AxisParams>> {
    spec.validate()?;
    spec.axes
        .iter()
        .enumerate()
        .map(|(r, a)| axis_queue(a, r).map(AxisParams::Queue))
        .collect()
}

/// Spectrum of `Lᵀ`, with eigenvectors kept as per-axis factors.
pub fn diffusion_spectrum(spec: &DiffusionSpec) -> Result<SpectrumReport> {
    diffusion_spectrum_with_limit(spec, DEFAULT_STATE_LIMIT)
}

pub fn diffusion_spectrum_with_limit(spec: &DiffusionSpec, limit: usize) -> Result<SpectrumReport> {
    let axes = queue_axes(spec)?;
    kron_spectrum_with_limit(&spec.space(), &axes, SpectrumKind::Generator, limit)
}

/// Product of the per-axis geometric distributions.
pub fn diffusion_steady_state(spec: &DiffusionSpec) -> Result<ProbabilityTensor> {
    spec.validate()?;
    let factors = spec
        .axes
        .iter()
        .map(|a| axis_rates(a).map(|r| geometric_distribution(a.n, r.ratio)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProbabilityTensor::from_factors(&factors))
}

/// Slowest decay rate: the largest first nonzero eigenvalue over the axes.
pub fn diffusion_gap(spec: &DiffusionSpec) -> Result<f64> {
    let mut gap = f64::NEG_INFINITY;
    for (r, axis) in spec.axes.iter().enumerate() {
        let q = axis_queue(axis, r)?;
        let angle = std::f64::consts::PI / axis.n as f64;
        gap = gap.max(-q.lambda - q.mu + 2.0 * (q.lambda * q.mu).sqrt() * angle.cos());
    }
    if spec.axes.is_empty() {
        return Err(Error::InvalidDimension("diffusion needs at least one axis".into()));
    }
    Ok(gap)
}

/// Least-squares slope of `ln‖p(t) − p∞‖₂` against `t` over the second half
/// of `t_grid`.
pub fn convergence_rate_estimate(spec: &DiffusionSpec, p0: &ProbabilityTensor, t_grid: &[f64]) -> Result<f64> {
    if t_grid.len() < 3 {
        return Err(Error::DegenerateInput(format!("need at least 3 times, got {}", t_grid.len())));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) || !(t_grid[0] >= 0.0) {
        return Err(Error::DegenerateInput("times must be nonnegative and strictly increasing".into()));
    }
    let report = diffusion_spectrum(spec)?;
    let steady = diffusion_steady_state(spec)?;
    let tail = &t_grid[t_grid.len() / 2..];
    let mut logs = Vec::with_capacity(tail.len());
    for &t in tail {
        let p = transient_evolve(&report, p0, Evolution::GeneratorTime(t))?;
        let dist = p.values.iter().zip(&steady.values).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        // Below this level the distance is rounding noise.
        if !(dist > 1e-14) {
            return Err(Error::DegenerateInput(format!(
                "distance to the steady state is {dist:e} at t = {t}; the initial distribution is (or has decayed to) the steady state"
            )));
        }
        logs.push(dist.ln());
    }
    let m = tail.len() as f64;
    let t_mean = tail.iter().sum::<f64>() / m;
    let y_mean = logs.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in tail.iter().zip(&logs) {
        sxy += (t - t_mean) * (y - y_mean);
        sxx += (t - t_mean) * (t - t_mean);
    }
    Ok(sxy / sxx)
}

/// Dense `Lᵀ`, row-major, for cross-checking small problems.
pub fn assemble_dense_transpose(spec: &DiffusionSpec) -> Result<Vec<Vec<f64>>> {
    const DENSE_LIMIT: usize = 4096;
    let total: usize = spec.dims().iter().product();
    if total > DENSE_LIMIT {
        return Err(Error::ResourceLimit { requested: total, limit: DENSE_LIMIT });
    }
    let mut dense = vec![vec![0.0; total]; total];
    let mut e = vec![0.0; total];
    for j in 0..total {
        e[j] = 1.0;
        let col = generator_apply(spec, &e, true)?;
        for (i, v) in col.into_iter().enumerate() {
            dense[i][j] = v;
        }
        e[j] = 0.0;
    }
    Ok(dense)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn axis(n: usize, delta: f64, mu: f64, sigma2: f64) -> DiffusionAxis {
        DiffusionAxis::with_delta(n, delta, mu, sigma2).unwrap()
    }

    #[test]
    fn rate_examples() {
        let r = axis_rates(&axis(31, 1.0 / 30.0, 0.01, 0.0025)).unwrap();
        assert_relative_eq!(r.up, 1.425, max_relative = 1e-14);
        assert_relative_eq!(r.down, 1.125, max_relative = 1e-14);
        assert_relative_eq!(r.ratio, 19.0 / 15.0, max_relative = 1e-14);

        let r = axis_rates(&axis(5, 0.1, -0.2, 0.1)).unwrap();
        assert_relative_eq!(r.up, 5.0, max_relative = 1e-14);
        assert_relative_eq!(r.down, 7.0, max_relative = 1e-14);
        assert_relative_eq!(r.ratio, 5.0 / 7.0, max_relative = 1e-14);

        let r = axis_rates(&axis(5, 0.25, 0.0, 0.3)).unwrap();
        assert_eq!(r.up, r.down);
        assert_eq!(r.ratio, 1.0);

        assert!(DiffusionAxis::with_delta(3, 0.1, 0.0, 0.0).is_err());
        assert!(DiffusionAxis::with_delta(3, -0.1, 0.0, 1.0).is_err());
        assert!(DiffusionAxis::new(1, 0.0, 1.0).is_err());
    }

    #[test]
    fn rates_continuous_at_zero_drift() {
        let at = |mu| axis_rates(&axis(10, 0.05, mu, 0.02)).unwrap();
        let (l, r) = (at(-1e-15), at(1e-15));
        assert!((l.up - r.up).abs() < 1e-10 && (l.down - r.down).abs() < 1e-10);
        assert!((l.ratio - r.ratio).abs() < 1e-12);
    }

    #[test]
    fn generator_examples() {
        let g = axis_generator(&axis(3, 1.0, 0.0, 2.0)).unwrap();
        assert_eq!(g.to_dense(), vec![vec![-1.0, 1.0, 0.0], vec![1.0, -2.0, 1.0], vec![0.0, 1.0, -1.0]]);
        let g = axis_generator(&axis(2, 1.0, 1.0, 2.0)).unwrap();
        assert_eq!(g.to_dense(), vec![vec![-2.0, 2.0], vec![1.0, -1.0]]);
    }

    #[test]
    fn generator_is_drift_plus_diffusion() {
        // Dyadic parameters make every entry exact.
        for mu in [0.5, -0.75, 0.0] {
            let a = axis(6, 0.25, mu, 0.125);
            let g = axis_generator(&a).unwrap().to_dense();
            let d = drift_matrix(&a).unwrap().to_dense();
            let l = diffusion_matrix(&a).unwrap().to_dense();
            for i in 0..6 {
                for j in 0..6 {
                    assert_eq!(g[i][j], d[i][j] + l[i][j], "mu={mu} ({i},{j})");
                }
            }
        }
        let a = axis(31, 1.0 / 30.0, -0.013, 0.0031);
        let g = axis_generator(&a).unwrap().to_dense();
        let d = drift_matrix(&a).unwrap().to_dense();
        let l = diffusion_matrix(&a).unwrap().to_dense();
        for i in 0..31 {
            for j in 0..31 {
                assert!((g[i][j] - d[i][j] - l[i][j]).abs() <= 4.0 * f64::EPSILON * g[i][j].abs());
            }
        }
    }

    #[test]
    fn apply_annihilates_constants() {
        let spec = DiffusionSpec::new(vec![axis(3, 0.5, 0.1, 0.2), axis(4, 0.3, -0.2, 0.05)]).unwrap();
        let y = generator_apply(&spec, &[1.0; 12], false).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-13));
        assert!(generator_apply(&spec, &[1.0; 11], false).is_err());
    }

    #[test]
    fn spectrum_of_two_laplacians() {
        let spec = DiffusionSpec::new(vec![axis(2, 1.0, 0.0, 2.0); 2]).unwrap();
        let r = diffusion_spectrum(&spec).unwrap();
        for (a, b) in r.eigenvalues.iter().zip([0.0, -2.0, -2.0, -4.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((diffusion_gap(&spec).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn steady_state_examples() {
        let spec = DiffusionSpec::new(vec![axis(3, 0.2, 0.0, 0.1), axis(2, 0.4, 0.0, 0.3)]).unwrap();
        let p = diffusion_steady_state(&spec).unwrap();
        assert!(p.values.iter().all(|&v| (v - 1.0 / 6.0).abs() < 1e-16));

        // σ²/2 = 1 and μ = 1 give rates (2, 1).
        let spec = DiffusionSpec::new(vec![axis(3, 1.0, 1.0, 2.0)]).unwrap();
        let p = diffusion_steady_state(&spec).unwrap();
        for (a, b) in p.values.iter().zip([1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let lt = generator_apply(&spec, &p.values, true).unwrap();
        assert!(lt.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn two_state_rate() {
        let spec = DiffusionSpec::new(vec![axis(2, 1.0, 0.0, 2.0)]).unwrap();
        let p0 = ProbabilityTensor::new(vec![2], vec![1.0, 0.0]).unwrap();
        let grid: Vec<f64> = (0..20).map(|k| 0.25 * k as f64).collect();
        let slope = convergence_rate_estimate(&spec, &p0, &grid).unwrap();
        assert!((slope + 2.0).abs() < 0.02, "{slope}");

        let steady = diffusion_steady_state(&spec).unwrap();
        assert!(matches!(
            convergence_rate_estimate(&spec, &steady, &grid),
            Err(Error::DegenerateInput(_))
        ));
        assert!(convergence_rate_estimate(&spec, &p0, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn dense_assembly_limit() {
        let spec = DiffusionSpec::new(vec![axis(65, 0.1, 0.0, 1.0); 2]).unwrap();
        assert!(matches!(assemble_dense_transpose(&spec), Err(Error::ResourceLimit { .. })));
    }
}
