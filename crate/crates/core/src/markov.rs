//! Birth-death chains on `{1, …, n}` and their tensor products.
//!
//! The generator of a finite queue with arrival rate `λ` and service rate `μ`
//! is tridiagonal. Its transpose is similar, through a diagonal scaling `D`,
//! to `(−λ−μ)I + √(λμ)·T(n, 1/τ, τ)` with `τ = √(λ/μ)`. The reciprocal
//! corners make that spectrum available in closed form, so every
//! eigenvector here is `D` times an orthonormal vector. Expansions in the
//! non-orthogonal eigenbasis of the transposed generator are done in the
//! scaled coordinates, where the basis is orthonormal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::closed_form;
use crate::tau::{SymmetricTridiagonal, TauParams};
use crate::tensor::{kron_all, mode_product, MultiIndexSpace, ProbabilityTensor, NORMALIZATION_TOL};

/// Queue on `n` states with up-rate `lambda` and down-rate `mu`. The rates
/// may both be negative for spectral work; only positive rates describe a
/// Markov process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BirthDeathParams {
    pub n: usize,
    pub lambda: f64,
    pub mu: f64,
}

impl BirthDeathParams {
    pub fn new(n: usize, lambda: f64, mu: f64) -> Result<Self> {
        let p = Self { n, lambda, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDimension(format!("queue needs n >= 2, got {}", self.n)));
        }
        if !(self.lambda * self.mu > 0.0) || !self.lambda.is_finite() || !self.mu.is_finite() {
            return Err(Error::Domain(format!(
                "rates must be finite with lambda*mu > 0 (lambda={}, mu={})",
                self.lambda, self.mu
            )));
        }
        Ok(())
    }

    pub fn is_probabilistic(&self) -> bool {
        self.lambda > 0.0 && self.mu > 0.0
    }
}

/// Lazy random walk: step up with probability `p`, down with `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomWalkParams {
    pub n: usize,
    pub p: f64,
    pub q: f64,
}

impl RandomWalkParams {
    pub fn new(n: usize, p: f64, q: f64) -> Result<Self> {
        let w = Self { n, p, q };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidDimension(format!("walk needs n >= 2, got {}", self.n)));
        }
        if !(self.p > 0.0 && self.q > 0.0) || self.p + self.q > 1.0 + 1e-15 {
            return Err(Error::Domain(format!(
                "walk probabilities need p > 0, q > 0, p + q <= 1 (p={}, q={})",
                self.p, self.q
            )));
        }
        Ok(())
    }

    fn as_queue(&self) -> BirthDeathParams {
        BirthDeathParams { n: self.n, lambda: self.p, mu: self.q }
    }
}

/// General real tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn transpose(&self) -> Self {
        Self { lower: self.upper.clone(), diag: self.diag.clone(), upper: self.lower.clone() }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.upper[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.matvec(&vec![1.0; self.dim()])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i][i + 1] = self.upper[i];
                a[i + 1][i] = self.lower[i];
            }
        }
        a
    }
}

/// Generator with rows summing to zero: diagonal `(−λ, −λ−μ, …, −λ−μ, −μ)`,
/// `λ` above the diagonal and `μ` below.
pub fn queue_generator(params: BirthDeathParams) -> Result<Tridiagonal> {
    params.validate()?;
    let BirthDeathParams { n, lambda, mu } = params;
    let mut diag = vec![-lambda - mu; n];
    diag[0] = -lambda;
    diag[n - 1] = -mu;
    Ok(Tridiagonal { lower: vec![mu; n - 1], diag, upper: vec![lambda; n - 1] })
}

/// Row-stochastic transition matrix `I + Q(p, q)`.
pub fn walk_transition(params: RandomWalkParams) -> Result<Tridiagonal> {
    params.validate()?;
    let mut t = queue_generator(params.as_queue())?;
    for d in &mut t.diag {
        *d += 1.0;
    }
    Ok(t)
}

/// `T = D X D⁻¹` with `D` positive diagonal and `X` symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symmetrized {
    pub scaling: Vec<f64>,
    pub matrix: SymmetricTridiagonal,
}

/// Diagonal similarity to a symmetric matrix. Requires every product of
/// paired off-diagonal entries to be positive.
pub fn symmetrize(t: &Tridiagonal) -> Result<Symmetrized> {
    let n = t.dim();
    if n == 0 || t.lower.len() + 1 != n || t.upper.len() + 1 != n {
        return Err(Error::InvalidDimension("malformed tridiagonal matrix".into()));
    }
    let mut scaling = vec![1.0; n];
    let mut offdiag = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let (b, c) = (t.upper[i], t.lower[i]);
        let product = b * c;
        if !(product > 0.0) {
            return Err(Error::NotSymmetrizable { index: i + 1, product });
        }
        offdiag.push(product.sqrt());
        scaling[i + 1] = scaling[i] * (c / b).sqrt();
    }
    Ok(Symmetrized {
        scaling,
        matrix: SymmetricTridiagonal { diag: t.diag.clone(), offdiag },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    /// Discrete-time transition matrix; tensor products multiply eigenvalues.
    Chain,
    /// Continuous-time generator; Kronecker sums add eigenvalues.
    Generator,
}

/// Spectrum of one axis, for the transposed generator or transition matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisSpectrum {
    pub n: usize,
    /// `eigenvalues[k]` belongs to mode `k`; mode 0 is the stationary one.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors of the symmetrized matrix, `basis[k]` for
    /// mode `k`.
    pub basis: Vec<Vec<f64>>,
    /// Diagonal of `D`: `τ^(i−1)`.
    pub scaling: Vec<f64>,
    /// Normalized geometric distribution with ratio `λ/μ`.
    pub stationary: Vec<f64>,
    pub probabilistic: bool,
    log_tau: f64,
}

impl AxisSpectrum {
    /// Eigenvector of mode `k` in the original coordinates (`D` times the
    /// orthonormal basis vector).
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        self.basis[k].iter().zip(&self.scaling).map(|(u, d)| u * d).collect()
    }

    /// Dense row-major matrix `D U diag(f(ν)) Uᵀ D⁻¹`.
    fn spectral_matrix(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.n;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&v| f(v)).collect();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for (k, w) in weights.iter().enumerate() {
                    acc += self.basis[k][i] * w * self.basis[k][j];
                }
                m[i * n + j] = acc * ((i as f64 - j as f64) * self.log_tau).exp();
            }
        }
        m
    }

    /// Rows `k`: `u_kᵀ D⁻¹`, the left eigenvectors dual to
    /// [`eigenvector`](Self::eigenvector).
    fn analysis_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for k in 0..n {
            for j in 0..n {
                m[k * n + j] = self.basis[k][j] / self.scaling[j];
            }
        }
        m
    }

    /// Columns `k`: `D u_k`.
    fn synthesis_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                m[i * n + k] = self.basis[k][i] * self.scaling[i];
            }
        }
        m
    }
}

/// Normalized `[1, ρ, …, ρ^(n−1)]`, evaluated from whichever end keeps the
/// powers bounded by one; uniform when `|ρ − 1| ≤ 1e-12`.
pub fn geometric_distribution(n: usize, rho: f64) -> Vec<f64> {
    if (rho - 1.0).abs() <= 1e-12 {
        return vec![1.0 / n as f64; n];
    }
    let w: Vec<f64> = if rho < 1.0 {
        (0..n).map(|k| rho.powi(k as i32)).collect()
    } else {
        (0..n).map(|k| rho.powi(k as i32 - (n as i32 - 1))).collect()
    };
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn queue_axis(params: BirthDeathParams) -> Result<AxisSpectrum> {
    params.validate()?;
    let BirthDeathParams { n, lambda, mu } = params;
    let nf = n as f64;
    let coupling = (lambda * mu).sqrt();
    let log_tau = 0.5 * (lambda / mu).ln();
    let tau = log_tau.exp();

    let decomposition = closed_form(TauParams { n, eps: tau.recip(), phi: tau })
        .ok_or_else(|| Error::Domain("reciprocal corners should have a closed form".into()))?;
    // Sorted descending: the geometric pair first, then angles kπ/n.
    let mut basis: Vec<Vec<f64>> = decomposition.pairs.into_iter().map(|p| p.vector).collect();
    if lambda < 0.0 {
        // Negative rates flip the sign of the coupling:
        // X = (−λ−μ)I − √(λμ)·T(1/τ, τ). The geometric pair still gives
        // mode 0, and mode k takes the vector of angle (n−k)π/n.
        basis[1..].reverse();
    }

    let mut eigenvalues = Vec::with_capacity(n);
    eigenvalues.push(0.0);
    for k in 1..n {
        eigenvalues.push(-lambda - mu + 2.0 * coupling * (k as f64 * std::f64::consts::PI / nf).cos());
    }
    let scaling = (0..n).map(|i| (i as f64 * log_tau).exp()).collect();
    Ok(AxisSpectrum {
        n,
        eigenvalues,
        basis,
        scaling,
        stationary: geometric_distribution(n, lambda / mu),
        probabilistic: params.is_probabilistic(),
        log_tau,
    })
}

fn walk_axis(params: RandomWalkParams) -> Result<AxisSpectrum> {
    params.validate()?;
    let mut axis = queue_axis(params.as_queue())?;
    for v in &mut axis.eigenvalues {
        *v += 1.0;
    }
    axis.eigenvalues[0] = 1.0;
    Ok(axis)
}

/// Eigen-structure of a tensor-product chain or Kronecker-sum generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub kind: SpectrumKind,
    pub dims: Vec<usize>,
    pub axes: Vec<AxisSpectrum>,
    /// One eigenvalue per mode multi-index, in lexicographic order.
    pub eigenvalues: Vec<f64>,
    /// Product of the per-axis stationary distributions; absent when some
    /// axis has negative rates.
    pub steady_state: Option<ProbabilityTensor>,
    /// Largest eigenvalue other than the stationary one.
    pub gap: f64,
}

impl SpectrumReport {
    /// Eigenvector of the mode with zero-based multi-index `k`, as a
    /// Kronecker product of the per-axis eigenvectors.
    pub fn eigenvector(&self, k: &[usize]) -> Result<Vec<f64>> {
        if k.len() != self.axes.len() || k.iter().zip(&self.dims).any(|(a, n)| a >= n) {
            return Err(Error::ShapeMismatch { expected: self.dims.clone(), found: k.to_vec() });
        }
        let factors: Vec<Vec<f64>> = self.axes.iter().zip(k).map(|(a, &kr)| a.eigenvector(kr)).collect();
        Ok(kron_all(&factors))
    }

    /// Coefficients of `x` in the eigenbasis, indexed like
    /// [`eigenvalues`](Self::eigenvalues).
    pub fn expand(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let mut c = x.to_vec();
        for (r, axis) in self.axes.iter().enumerate() {
            c = mode_product(&self.dims, r, &axis.analysis_matrix(), &c);
        }
        Ok(c)
    }

    /// Inverse of [`expand`](Self::expand).
    pub fn synthesize(&self, coefficients: &[f64]) -> Result<Vec<f64>> {
        self.check_len(coefficients.len())?;
        let mut x = coefficients.to_vec();
        for (r, axis) in self.axes.iter().enumerate() {
            x = mode_product(&self.dims, r, &axis.synthesis_matrix(), &x);
        }
        Ok(x)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        let total: usize = self.dims.iter().product();
        if len != total {
            return Err(Error::ShapeMismatch { expected: self.dims.clone(), found: vec![len] });
        }
        Ok(())
    }
}

/// Per-axis input to [`kron_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisParams {
    Queue(BirthDeathParams),
    Walk(RandomWalkParams),
}

impl AxisParams {
    fn n(&self) -> usize {
        match self {
            AxisParams::Queue(p) => p.n,
            AxisParams::Walk(p) => p.n,
        }
    }
}

/// Default cap on the number of listed eigenvalues.
pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

pub fn kron_spectrum(space: &MultiIndexSpace, axes: &[AxisParams], kind: SpectrumKind) -> Result<SpectrumReport> {
    kron_spectrum_with_limit(space, axes, kind, DEFAULT_STATE_LIMIT)
}

pub fn kron_spectrum_with_limit(
    space: &MultiIndexSpace,
    axes: &[AxisParams],
    kind: SpectrumKind,
    limit: usize,
) -> Result<SpectrumReport> {
    let found: Vec<usize> = axes.iter().map(AxisParams::n).collect();
    if found != space.dims {
        return Err(Error::ShapeMismatch { expected: space.dims.clone(), found });
    }
    let total = space.len();
    if total > limit {
        return Err(Error::ResourceLimit { requested: total, limit });
    }
    let spectra = axes
        .iter()
        .map(|a| match (kind, a) {
            (SpectrumKind::Generator, AxisParams::Queue(p)) => queue_axis(*p),
            (SpectrumKind::Chain, AxisParams::Walk(p)) => walk_axis(*p),
            (SpectrumKind::Generator, AxisParams::Walk(_)) => Err(Error::Domain(
                "generator spectra need queue axes; use kind=chain for walks".into(),
            )),
            (SpectrumKind::Chain, AxisParams::Queue(_)) => Err(Error::Domain(
                "chain spectra need walk axes; use kind=generator for queues".into(),
            )),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(kind, spectra))
}

fn assemble(kind: SpectrumKind, axes: Vec<AxisSpectrum>) -> SpectrumReport {
    let dims: Vec<usize> = axes.iter().map(|a| a.n).collect();
    let mut eigenvalues = vec![match kind {
        SpectrumKind::Generator => 0.0,
        SpectrumKind::Chain => 1.0,
    }];
    for axis in &axes {
        eigenvalues = eigenvalues
            .iter()
            .flat_map(|&acc| {
                axis.eigenvalues.iter().map(move |&v| match kind {
                    SpectrumKind::Generator => acc + v,
                    SpectrumKind::Chain => acc * v,
                })
            })
            .collect();
    }
    let gap = eigenvalues[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let steady_state = axes.iter().all(|a| a.probabilistic).then(|| {
        let factors: Vec<Vec<f64>> = axes.iter().map(|a| a.stationary.clone()).collect();
        ProbabilityTensor::from_factors(&factors)
    });
    SpectrumReport { kind, dims, axes, eigenvalues, steady_state, gap }
}

/// Spectrum of the transposed queue generator: `ν_0 = 0` and
/// `ν_k = −λ−μ+2√(λμ)cos(kπ/n)`.
pub fn queue_spectrum(params: BirthDeathParams) -> Result<SpectrumReport> {
    Ok(assemble(SpectrumKind::Generator, vec![queue_axis(params)?]))
}

/// Spectrum of the transposed walk matrix: `1` and `1−p−q+2√(pq)cos(kπ/n)`.
pub fn walk_spectrum(params: RandomWalkParams) -> Result<SpectrumReport> {
    Ok(assemble(SpectrumKind::Chain, vec![walk_axis(params)?]))
}

/// Unnormalized eigenvector of `Qᵀ` for mode `k` in explicit form:
/// `[1, τ², …]` for `k = 0`, otherwise `τ^(i−1) sin(iθ) − τ^(i−2) sin((i−1)θ)`
/// with `θ = kπ/n`. When both rates are negative the matching angle is
/// `(n−k)π/n` instead.
pub fn queue_mode_vector(params: BirthDeathParams, k: usize) -> Result<Vec<f64>> {
    params.validate()?;
    let n = params.n;
    if k >= n {
        return Err(Error::Domain(format!("mode {k} is outside 0..{n}")));
    }
    let log_tau = 0.5 * (params.lambda / params.mu).ln();
    if k == 0 {
        return Ok((0..n).map(|i| (2.0 * i as f64 * log_tau).exp()).collect());
    }
    let m = if params.lambda > 0.0 { k } else { n - k };
    let theta = m as f64 * std::f64::consts::PI / n as f64;
    Ok((1..=n)
        .map(|i| {
            let i = i as f64;
            ((i - 1.0) * log_tau).exp() * (i * theta).sin() - ((i - 2.0) * log_tau).exp() * ((i - 1.0) * theta).sin()
        })
        .collect())
}

pub fn lex_linearize(space: &MultiIndexSpace, idx: &[usize]) -> Result<usize> {
    space.linearize(idx)
}

pub fn lex_delinearize(space: &MultiIndexSpace, flat: usize) -> Result<Vec<usize>> {
    space.delinearize(flat)
}

/// Elapsed time for [`transient_evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evolution {
    /// Number of steps of a discrete-time chain.
    ChainSteps(u64),
    /// Continuous time for a generator.
    GeneratorTime(f64),
}

/// Builds the dense per-axis matrix applied along one tensor mode.
type Propagator = Box<dyn Fn(&AxisSpectrum) -> Vec<f64>>;

/// Distribution after the given time, starting from `p0`.
///
/// Each axis contributes the matrix `D U diag(g(ν)) Uᵀ D⁻¹` with
/// `g(ν) = e^(νt)` or `ν^t`, applied along that axis; this equals summing
/// the eigen-expansion of `p0` mode by mode.
pub fn transient_evolve(report: &SpectrumReport, p0: &ProbabilityTensor, time: Evolution) -> Result<ProbabilityTensor> {
    if p0.dims != report.dims {
        return Err(Error::ShapeMismatch { expected: report.dims.clone(), found: p0.dims.clone() });
    }
    p0.check_normalized(NORMALIZATION_TOL)?;
    let propagator: Propagator = match (report.kind, time) {
        (SpectrumKind::Generator, Evolution::GeneratorTime(t)) => {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::Domain(format!("time must be finite and nonnegative, got {t}")));
            }
            if t == 0.0 {
                return Ok(p0.clone());
            }
            Box::new(move |a: &AxisSpectrum| a.spectral_matrix(|v| (v * t).exp()))
        }
        (SpectrumKind::Chain, Evolution::ChainSteps(steps)) => {
            if steps == 0 {
                return Ok(p0.clone());
            }
            let steps = i32::try_from(steps)
                .map_err(|_| Error::Domain(format!("step count {steps} is too large")))?;
            Box::new(move |a: &AxisSpectrum| a.spectral_matrix(|v| v.powi(steps)))
        }
        (kind, time) => {
            return Err(Error::Domain(format!("{time:?} does not apply to a {kind:?} spectrum")));
        }
    };
    let mut values = p0.values.clone();
    for (r, axis) in report.axes.iter().enumerate() {
        values = mode_product(&report.dims, r, &propagator(axis), &values);
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        return Err(Error::NotNormalized { sum, min });
    }
    Ok(ProbabilityTensor { dims: report.dims.clone(), values })
}
