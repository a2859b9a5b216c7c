//! Bayesian credibility premiums `E[Θ | X = x]` in random shift models
//! `(X, Θ) = (Θ + Y, Θ)` with `Y` independent of `Θ`.
//!
//! Vectors are row vectors and matrices multiply from the right, so the
//! Gaussian premium reads `x + (μ − x)(Σ + Σ0)^(-1) Σ`.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;

use crate::error::{ensure_positive, Error, Result};
use crate::radial::RadialLaw;
use crate::stats::{fill_rows, map_chunks, Matrix, MvNormal, RngStream};

/// Draws whose prior weight exceeds this count towards the effective sample.
pub const MIN_PRIOR_WEIGHT: f64 = 1e-300;

/// Minimum number of effective draws before `premium_mc` reports an estimate.
pub const MIN_EFFECTIVE_DRAWS: usize = 50;

/// Scalar Gaussian premium `x + σ²/(σ² + τ²) (μ − x)`.
pub fn premium_scalar(mu: f64, sigma2: f64, tau2: f64, x: f64) -> Result<f64> {
    ensure_positive("sigma2", sigma2)?;
    ensure_positive("tau2", tau2)?;
    Ok(x + sigma2 / (sigma2 + tau2) * (mu - x))
}

/// Gaussian prior `Θ ~ N(μ, Σ0)` observed through Gaussian noise `Y ~ N(0, Σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianShiftModel {
    mu: Vec<f64>,
    sigma: Matrix,
    sigma0: Matrix,
    // (Σ + Σ0)^(-1) Σ
    weight: Matrix,
}

impl GaussianShiftModel {
    pub fn new(mu: Vec<f64>, sigma: Matrix, sigma0: Matrix) -> Result<Self> {
        let d = mu.len();
        if d == 0 {
            return Err(Error::Shape("mu must be non-empty".into()));
        }
        for (name, m) in [("sigma", &sigma), ("sigma0", &sigma0)] {
            if m.rows() != d || m.cols() != d {
                return Err(Error::Shape(format!(
                    "{name} must be {d}x{d} to match mu, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_symmetric(1e-12) {
                return Err(Error::Parameter(format!("{name} must be symmetric")));
            }
            m.cholesky_semidefinite()
                .map_err(|_| Error::Parameter(format!("{name} must be positive semidefinite")))?;
        }
        let total = sigma.add(&sigma0)?;
        total
            .cholesky()
            .map_err(|_| Error::Singular("sigma + sigma0 must be positive definite".into()))?;
        let weight = total.inverse()?.matmul(&sigma)?;
        Ok(Self {
            mu,
            sigma,
            sigma0,
            weight,
        })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    pub fn sigma0(&self) -> &Matrix {
        &self.sigma0
    }

    pub fn prior(&self) -> Result<MvNormal> {
        MvNormal::new(self.mu.clone(), &self.sigma0)
    }

    pub fn noise(&self) -> Result<MvNormal> {
        MvNormal::new(vec![0.0; self.dim()], &self.sigma)
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Shape(format!(
                "observation has length {} but the model has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// `x + (μ − x)(Σ + Σ0)^(-1) Σ`.
pub fn premium_gaussian(model: &GaussianShiftModel, x: &[f64]) -> Result<Vec<f64>> {
    model.check_x(x)?;
    let diff: Vec<f64> = model.mu.iter().zip(x).map(|(m, xi)| m - xi).collect();
    let adj = model.weight.left_mul(&diff)?;
    Ok(x.iter().zip(adj).map(|(xi, a)| xi + a).collect())
}

/// The precision form with weight `(Σ0 Σ^(-1) + I)^(-1)`, available when Σ is
/// positive definite.
///
/// `(Σ0 Σ^(-1) + I)^(-1) = Σ (Σ + Σ0)^(-1)` is the transpose of the covariance
/// form's weight, so it acts on `μ − x` as a column vector; as a right factor
/// of a row vector it would only agree with [`premium_gaussian`] when Σ and Σ0
/// commute.
pub fn premium_gaussian_precision_form(model: &GaussianShiftModel, x: &[f64]) -> Result<Vec<f64>> {
    model.check_x(x)?;
    let d = model.dim();
    let sigma_inv = model.sigma.inverse()?;
    let inner = model.sigma0.matmul(&sigma_inv)?.add(&Matrix::identity(d))?;
    let w = inner.inverse()?;
    let diff: Vec<f64> = model.mu.iter().zip(x).map(|(m, xi)| m - xi).collect();
    let adj = w.transpose().left_mul(&diff)?;
    Ok(x.iter().zip(adj).map(|(xi, a)| xi + a).collect())
}

/// Block matrix `C* = (C_II + C_IJ, C_IJ; C_JI + C_JJ, C_JJ)` for a `2d x 2d`
/// matrix `C` with `I = {0..d}`, `J = {d..2d}`.
pub fn build_cstar(c: &Matrix) -> Result<Matrix> {
    if !c.is_square() || !c.rows().is_multiple_of(2) {
        return Err(Error::Shape(format!(
            "C must be square with even dimension, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    let d = c.rows() / 2;
    let mut out = Matrix::zeros(2 * d, 2 * d);
    for i in 0..2 * d {
        for j in 0..d {
            out.set(i, j, c.get(i, j) + c.get(i, j + d));
            out.set(i, j + d, c.get(i, j + d));
        }
    }
    Ok(out)
}

/// Elliptical model `(Y, Θ) = R U C + ν` with `U` uniform on the unit sphere
/// of `R^{2d}` and `ν = (0, μ)`.
#[derive(Debug, Clone)]
pub struct EllipticalShiftModel {
    c: Matrix,
    nu: Vec<f64>,
    radial: RadialLaw,
    b: Matrix,
    // B_II^(-1) B_IJ
    weight: Matrix,
}

impl EllipticalShiftModel {
    /// Requires `ν_I = 0` exactly and `B = (C*)ᵀ C*` with a nonsingular `B_II`.
    /// The radial law is assumed to have a finite mean.
    pub fn new(c: Matrix, nu: Vec<f64>, radial: RadialLaw) -> Result<Self> {
        let cstar = build_cstar(&c)?;
        let d = c.rows() / 2;
        if nu.len() != 2 * d {
            return Err(Error::Shape(format!("nu must have length {}, got {}", 2 * d, nu.len())));
        }
        if let Some(i) = nu[..d].iter().position(|&v| v != 0.0) {
            return Err(Error::Parameter(format!(
                "nu[{i}] must be 0: only nu_I = 0 is supported"
            )));
        }
        radial.validate()?;
        if radial.has_finite_mean() == Some(false) {
            return Err(Error::Parameter(format!("radial law {radial} has an infinite mean")));
        }
        let b = cstar.transpose().matmul(&cstar)?;
        b.inverse()
            .map_err(|e| Error::Singular(format!("B = (C*)ᵀC* is singular: {e}")))?;
        let idx_i: Vec<usize> = (0..d).collect();
        let idx_j: Vec<usize> = (d..2 * d).collect();
        let b_ii = b.block(&idx_i, &idx_i)?;
        let b_ij = b.block(&idx_i, &idx_j)?;
        let weight = b_ii
            .inverse()
            .map_err(|e| Error::Singular(format!("B_II is singular: {e}")))?
            .matmul(&b_ij)?;
        Ok(Self {
            c,
            nu,
            radial,
            b,
            weight,
        })
    }

    pub fn dim(&self) -> usize {
        self.c.rows() / 2
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn mu(&self) -> &[f64] {
        &self.nu[self.dim()..]
    }

    pub fn radial(&self) -> &RadialLaw {
        &self.radial
    }

    /// `B = (C*)ᵀ C*`.
    pub fn b(&self) -> &Matrix {
        &self.b
    }
}

/// `μ + (x − μ) B_II^(-1) B_IJ`.
pub fn premium_elliptical(model: &EllipticalShiftModel, x: &[f64]) -> Result<Vec<f64>> {
    let d = model.dim();
    if x.len() != d {
        return Err(Error::Shape(format!(
            "observation has length {} but the model has dimension {d}",
            x.len()
        )));
    }
    let mu = model.mu();
    let diff: Vec<f64> = x.iter().zip(mu).map(|(xi, m)| xi - m).collect();
    let adj = model.weight.left_mul(&diff)?;
    Ok(mu.iter().zip(adj).map(|(m, a)| m + a).collect())
}

pub type PriorDensity = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorSampler = Arc<dyn Fn(&mut dyn RngCore, &mut [f64]) + Send + Sync>;

/// Prior density `h` and a noise sampler for `Y`.
#[derive(Clone)]
pub struct GenericShiftModel {
    dim: usize,
    prior_density: PriorDensity,
    noise_sampler: VectorSampler,
    symmetric_noise: bool,
}

impl fmt::Debug for GenericShiftModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericShiftModel")
            .field("dim", &self.dim)
            .field("symmetric_noise", &self.symmetric_noise)
            .finish_non_exhaustive()
    }
}

impl GenericShiftModel {
    pub fn new(
        dim: usize,
        prior_density: PriorDensity,
        noise_sampler: VectorSampler,
        symmetric_noise: bool,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be >= 1".into()));
        }
        Ok(Self {
            dim,
            prior_density,
            noise_sampler,
            symmetric_noise,
        })
    }

    /// Gaussian prior density and Gaussian noise taken from `model`.
    pub fn from_gaussian(model: &GaussianShiftModel) -> Result<Self> {
        let d = model.dim();
        let chol = model.sigma0.cholesky()?;
        let prec = model.sigma0.inverse()?;
        let log_det: f64 = (0..d).map(|i| 2.0 * chol.get(i, i).ln()).sum();
        let log_norm = -0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + log_det);
        let mu = model.mu.clone();
        let density: PriorDensity = Arc::new(move |t: &[f64]| {
            let diff: Vec<f64> = t.iter().zip(&mu).map(|(a, b)| a - b).collect();
            let q: f64 = prec
                .left_mul(&diff)
                .expect("dimension checked")
                .iter()
                .zip(&diff)
                .map(|(a, b)| a * b)
                .sum();
            (log_norm - 0.5 * q).exp()
        });
        let noise = model.noise()?;
        let sampler: VectorSampler =
            Arc::new(move |rng: &mut dyn RngCore, out: &mut [f64]| noise.sample_into(rng, out));
        Self::new(d, density, sampler, true)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Monte Carlo premium with per-coordinate standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McPremium {
    pub estimate: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Draws with prior weight above [`MIN_PRIOR_WEIGHT`].
    pub effective_draws: usize,
}

#[derive(Clone)]
struct RatioSums {
    w: f64,
    ww: f64,
    yw: Vec<f64>,
    yww: Vec<f64>,
    yyww: Vec<f64>,
    effective: usize,
}

impl RatioSums {
    fn new(d: usize) -> Self {
        Self {
            w: 0.0,
            ww: 0.0,
            yw: vec![0.0; d],
            yww: vec![0.0; d],
            yyww: vec![0.0; d],
            effective: 0,
        }
    }

    fn merge(&mut self, o: &RatioSums) {
        self.w += o.w;
        self.ww += o.ww;
        for j in 0..self.yw.len() {
            self.yw[j] += o.yw[j];
            self.yww[j] += o.yww[j];
            self.yyww[j] += o.yyww[j];
        }
        self.effective += o.effective;
    }
}

/// Self-normalized estimate of `x − E[Y h(x − Y)] / E[h(x − Y)]`, or, when the
/// model declares symmetric noise, of the equivalent `x + E[Y h(x + Y)] / E[h(x + Y)]`.
///
/// Numerator and denominator share draws; the standard error is the delta
/// method for the ratio estimator. The result depends only on `(rng, n)`,
/// never on the worker count.
pub fn premium_mc(model: &GenericShiftModel, x: &[f64], n: usize, rng: &RngStream) -> Result<McPremium> {
    let d = model.dim;
    if x.len() != d {
        return Err(Error::Shape(format!(
            "observation has length {} but the model has dimension {d}",
            x.len()
        )));
    }
    if n < 1000 {
        return Err(Error::Parameter(format!("premium_mc needs n >= 1000, got {n}")));
    }
    let sign = if model.symmetric_noise { 1.0 } else { -1.0 };
    let parts = map_chunks(n, rng, |range, chunk| {
        let mut acc = RatioSums::new(d);
        let mut y = vec![0.0; d];
        let mut arg = vec![0.0; d];
        for _ in range {
            (model.noise_sampler)(&mut chunk.main, &mut y);
            for j in 0..d {
                arg[j] = x[j] + sign * y[j];
            }
            let h = (model.prior_density)(&arg);
            if !(h.is_finite() && h >= 0.0) {
                return Err(Error::Parameter(format!("prior density returned {h}")));
            }
            if h > MIN_PRIOR_WEIGHT {
                acc.effective += 1;
            }
            acc.w += h;
            acc.ww += h * h;
            for j in 0..d {
                acc.yw[j] += y[j] * h;
                acc.yww[j] += y[j] * h * h;
                acc.yyww[j] += y[j] * y[j] * h * h;
            }
        }
        Ok(acc)
    })?;
    let mut total = RatioSums::new(d);
    for p in &parts {
        total.merge(p);
    }
    if total.effective < MIN_EFFECTIVE_DRAWS || total.w <= 0.0 {
        return Err(Error::DegenerateDenominator {
            effective: total.effective,
            n,
        });
    }
    let nf = n as f64;
    let mean_w = total.w / nf;
    let mut estimate = Vec::with_capacity(d);
    let mut std_error = Vec::with_capacity(d);
    for j in 0..d {
        let r = total.yw[j] / total.w;
        // mean of (y - r)² h²
        let resid = (total.yyww[j] - 2.0 * r * total.yww[j] + r * r * total.ww) / nf;
        std_error.push((resid.max(0.0) / (nf - 1.0)).sqrt() / mean_w);
        estimate.push(x[j] + sign * r);
    }
    Ok(McPremium {
        estimate,
        std_error,
        effective_draws: total.effective,
    })
}

/// `n` rows of `(X, Θ) = (Θ + Y, Θ)` with independent `Θ ~ prior`, `Y ~ noise`.
pub fn shift_joint_sample<P, N>(dim: usize, prior: P, noise: N, n: usize, rng: &RngStream) -> Result<Matrix>
where
    P: Fn(&mut dyn RngCore, &mut [f64]) + Sync,
    N: Fn(&mut dyn RngCore, &mut [f64]) + Sync,
{
    if dim == 0 {
        return Err(Error::Shape("dimension must be >= 1".into()));
    }
    fill_rows(n, 2 * dim, rng, |chunk, row| {
        let (xs, theta) = row.split_at_mut(dim);
        prior(&mut chunk.aux, theta);
        noise(&mut chunk.main, xs);
        for (x, t) in xs.iter_mut().zip(theta.iter()) {
            if !(x.is_finite() && t.is_finite()) {
                return Err(Error::Parameter("samplers must return finite values".into()));
            }
            *x += t;
        }
        Ok(())
    })
}
