//! Random variate generators.
//!
//! Each law is a small validated struct implementing [`Distribution<f64>`];
//! the `*_sample` free functions validate and draw once.

use rand::distr::{Distribution, Open01};
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use super::linalg::Matrix;
use crate::error::{ensure_positive, param, Result};

/// `Gamma(shape, rate)` with density `rate^shape x^(shape-1) e^(-rate x) / Γ(shape)`.
///
/// Marsaglia-Tsang squeeze for `shape >= 1`; for `shape < 1` a
/// `Gamma(shape + 1)` draw is multiplied by `U^(1/shape)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma {
    shape: f64,
    rate: f64,
}

impl Gamma {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        ensure_positive("shape", shape)?;
        ensure_positive("rate", rate)?;
        Ok(Self { shape, rate })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl Distribution<f64> for Gamma {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        standard_gamma(self.shape, rng) / self.rate
    }
}

fn standard_gamma<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u: f64 = rng.sample(Open01);
        return marsaglia_tsang(shape + 1.0, rng) * (u.ln() / shape).exp();
    }
    marsaglia_tsang(shape, rng)
}

#[inline]
fn marsaglia_tsang<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.sample(Open01);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// `Beta(a, b)` realized as `G_a / (G_a + G_b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta {
    ga: Gamma,
    gb: Gamma,
}

impl Beta {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            ga: Gamma::new(a, 1.0)?,
            gb: Gamma::new(b, 1.0)?,
        })
    }
}

impl Distribution<f64> for Beta {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let x = self.ga.sample(rng);
            let y = self.gb.sample(rng);
            let s = x + y;
            // both parts can underflow for tiny shapes
            if s > 0.0 {
                return x / s;
            }
        }
    }
}

/// Pareto law on `[1, ∞)` with survival `x^(-index)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pareto {
    index: f64,
}

impl Pareto {
    pub fn new(index: f64) -> Result<Self> {
        ensure_positive("index", index)?;
        Ok(Self { index })
    }

    pub fn index(&self) -> f64 {
        self.index
    }
}

impl Distribution<f64> for Pareto {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.sample(Open01);
        (-u.ln() / self.index).exp()
    }
}

/// `1 / G` with `G ~ Gamma(shape, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvGamma {
    gamma: Gamma,
}

impl InvGamma {
    pub fn new(shape: f64) -> Result<Self> {
        Ok(Self {
            gamma: Gamma::new(shape, 1.0)?,
        })
    }
}

impl Distribution<f64> for InvGamma {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        1.0 / self.gamma.sample(rng)
    }
}

/// Positive variable `Y` with `Y^p ~ Gamma(alpha, 1/p)`, i.e. density
/// `p^(1-alpha) / Γ(alpha) · x^(p·alpha - 1) · exp(-x^p / p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YMarginal {
    gamma: Gamma,
    inv_p: f64,
}

impl YMarginal {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        ensure_positive("alpha", alpha)?;
        ensure_positive("p", p)?;
        Ok(Self {
            gamma: Gamma::new(alpha, 1.0 / p)?,
            inv_p: 1.0 / p,
        })
    }

    /// Draws the `p`-th power `Y^p` directly.
    #[inline]
    pub fn sample_power<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng)
    }
}

impl Distribution<f64> for YMarginal {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.gamma.sample(rng).powf(self.inv_p)
    }
}

/// A `±1` sign with `P(+1) = q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignFlip {
    q: f64,
}

impl SignFlip {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(param(format!("sign probability must lie in (0, 1], got {q}")));
        }
        Ok(Self { q })
    }
}

impl Distribution<f64> for SignFlip {
    #[inline]
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        if u < self.q {
            1.0
        } else {
            -1.0
        }
    }
}

/// Multivariate normal `N(mean, cov)` drawn as `mean + L z` with `cov = L Lᵀ`.
/// Semidefinite covariances (including the zero matrix) are accepted.
#[derive(Debug, Clone, PartialEq)]
pub struct MvNormal {
    mean: Vec<f64>,
    factor: Matrix,
}

impl MvNormal {
    pub fn new(mean: Vec<f64>, cov: &Matrix) -> Result<Self> {
        if cov.rows() != mean.len() {
            return Err(crate::Error::Shape(format!(
                "mean has length {} but covariance is {}x{}",
                mean.len(),
                cov.rows(),
                cov.cols()
            )));
        }
        let factor = cov.cholesky_semidefinite()?;
        Ok(Self { mean, factor })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Fills `out` (length `dim`) with one draw.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let d = self.dim();
        let mut z = [0.0f64; 16];
        let mut heap;
        let z: &mut [f64] = if d <= 16 {
            &mut z[..d]
        } else {
            heap = vec![0.0; d];
            &mut heap
        };
        for zi in z.iter_mut() {
            *zi = rng.sample(StandardNormal);
        }
        for i in 0..d {
            let row = self.factor.row(i);
            let mut acc = self.mean[i];
            for k in 0..=i {
                acc += row[k] * z[k];
            }
            out[i] = acc;
        }
    }
}

pub fn gamma_sample<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    Ok(Gamma::new(shape, rate)?.sample(rng))
}

pub fn beta_sample<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    Ok(Beta::new(a, b)?.sample(rng))
}

pub fn pareto_sample<R: Rng + ?Sized>(index: f64, rng: &mut R) -> Result<f64> {
    Ok(Pareto::new(index)?.sample(rng))
}

pub fn inv_gamma_sample<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> Result<f64> {
    Ok(InvGamma::new(shape)?.sample(rng))
}

pub fn y_marginal_sample<R: Rng + ?Sized>(alpha: f64, p: f64, rng: &mut R) -> Result<f64> {
    Ok(YMarginal::new(alpha, p)?.sample(rng))
}

#[inline]
pub fn normal_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Unit-mean exponential.
#[inline]
pub fn exp_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Exp1)
}

pub fn bernoulli_pm1<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Result<f64> {
    Ok(SignFlip::new(q)?.sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::gof::{ks_one_sample, EmpiricalSample};
    use crate::stats::special;
    use crate::stats::RngStream;

    fn draws<D: Distribution<f64>>(dist: &D, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = RngStream::new(seed, 0);
        (0..n).map(|_| dist.sample(&mut rng)).collect()
    }

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn gamma_mean() {
        let xs = draws(&Gamma::new(2.0, 0.5).unwrap(), 100_000, 1);
        let (m, _) = mean_var(&xs);
        assert!((m - 4.0).abs() < 0.1, "mean {m}");
    }

    #[test]
    fn gamma_one_is_exponential() {
        let xs = draws(&Gamma::new(1.0, 1.0).unwrap(), 10_000, 2);
        let r = ks_one_sample(&EmpiricalSample::new(xs).unwrap(), |x| 1.0 - (-x).exp(), 0.01).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn gamma_small_shape_variance() {
        let xs = draws(&Gamma::new(0.3, 1.0).unwrap(), 100_000, 3);
        let (m, v) = mean_var(&xs);
        assert!((v - 0.3).abs() < 0.02, "var {v}");
        assert!((m - 0.3).abs() < 0.01, "mean {m}");
        assert!(xs.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn gamma_rejects_bad_parameters() {
        assert!(Gamma::new(0.0, 1.0).is_err());
        assert!(Gamma::new(1.0, -1.0).is_err());
        assert!(Gamma::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn beta_means() {
        for (a, b, target, tol, seed) in [
            (1.0, 1.0, 0.5, 0.005, 10),
            (0.5, 0.5, 0.5, 0.01, 11),
            (2.0, 6.0, 0.25, 0.005, 12),
        ] {
            let xs = draws(&Beta::new(a, b).unwrap(), 100_000, seed);
            let (m, _) = mean_var(&xs);
            assert!((m - target).abs() < tol, "Beta({a},{b}) mean {m}");
            assert!(xs.iter().all(|&x| (0.0..=1.0).contains(&x)));
        }
        assert!(Beta::new(0.0, 1.0).is_err());
    }

    #[test]
    fn pareto_moments_and_support() {
        let xs = draws(&Pareto::new(2.0).unwrap(), 100_000, 20);
        let (m, _) = mean_var(&xs);
        assert!((m - 2.0).abs() < 0.05, "mean {m}");
        assert!(xs.iter().all(|&x| x >= 1.0));
        let ys = draws(&Pareto::new(1.0).unwrap(), 100_000, 21);
        let tail = ys.iter().filter(|&&y| y > 10.0).count() as f64 / ys.len() as f64;
        assert!((tail - 0.1).abs() < 0.01, "P(>10) = {tail}");
        assert!(Pareto::new(0.0).is_err());
    }

    #[test]
    fn inv_gamma_mean_and_reciprocal() {
        let xs = draws(&InvGamma::new(3.0).unwrap(), 100_000, 30);
        let (m, _) = mean_var(&xs);
        assert!((m - 0.5).abs() < 0.01, "mean {m}");
        let recip: Vec<f64> = xs.iter().take(10_000).map(|x| 1.0 / x).collect();
        let r = ks_one_sample(
            &EmpiricalSample::new(recip).unwrap(),
            |x| special::gamma_cdf(3.0, 1.0, x),
            0.01,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
        let heavy = draws(&InvGamma::new(0.5).unwrap(), 1000, 31);
        assert!(heavy.iter().all(|x| x.is_finite() && *x > 0.0));
        assert!(InvGamma::new(-1.0).is_err());
    }

    #[test]
    fn y_marginal_half_normal() {
        // Y^2 ~ Gamma(1/2, 1/2) = chi-square(1), so Y = |N(0,1)|.
        let xs = draws(&YMarginal::new(0.5, 2.0).unwrap(), 10_000, 40);
        let r = ks_one_sample(
            &EmpiricalSample::new(xs).unwrap(),
            |x| 2.0 * special::normal_cdf(x) - 1.0,
            0.01,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn y_marginal_exponential_and_power() {
        let xs = draws(&YMarginal::new(1.0, 1.0).unwrap(), 100_000, 41);
        let (m, _) = mean_var(&xs);
        assert!((m - 1.0).abs() < 0.02);
        let (alpha, p) = (1.7, 2.5);
        let ys: Vec<f64> = draws(&YMarginal::new(alpha, p).unwrap(), 10_000, 42)
            .into_iter()
            .map(|y| y.powf(p))
            .collect();
        let r = ks_one_sample(
            &EmpiricalSample::new(ys).unwrap(),
            |x| special::gamma_cdf(alpha, 1.0 / p, x),
            0.01,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
        assert!(YMarginal::new(1.0, 0.0).is_err());
    }

    #[test]
    fn signs_and_normals() {
        let mut rng = RngStream::new(50, 0);
        assert!((0..1000).all(|_| bernoulli_pm1(1.0, &mut rng).unwrap() == 1.0));
        let s = draws(&SignFlip::new(0.5).unwrap(), 100_000, 51);
        let (m, _) = mean_var(&s);
        assert!(m.abs() < 0.01);
        assert!(bernoulli_pm1(0.0, &mut rng).is_err());
        assert!(bernoulli_pm1(1.5, &mut rng).is_err());
        let zs: Vec<f64> = (0..100_000).map(|_| normal_sample(&mut rng)).collect();
        let (m, v) = mean_var(&zs);
        assert!(m.abs() < 0.01 && (v - 1.0).abs() < 0.02, "({m}, {v})");
    }

    #[test]
    fn gamma_additivity_of_powers() {
        let (p, alphas) = (2.5, [0.4, 1.0, 2.2]);
        let ys: Vec<YMarginal> = alphas.iter().map(|&a| YMarginal::new(a, p).unwrap()).collect();
        let mut rng = RngStream::new(60, 0);
        let sums: Vec<f64> = (0..10_000)
            .map(|_| ys.iter().map(|y| y.sample(&mut rng).powf(p)).sum())
            .collect();
        let total: f64 = alphas.iter().sum();
        let r = ks_one_sample(
            &EmpiricalSample::new(sums).unwrap(),
            |x| special::gamma_cdf(total, 1.0 / p, x),
            0.01,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn mv_normal_covariance() {
        let cov = Matrix::from_rows(&[vec![2.0, 0.6], vec![0.6, 1.0]]).unwrap();
        let mvn = MvNormal::new(vec![1.0, -1.0], &cov).unwrap();
        let mut rng = RngStream::new(70, 0);
        let n = 200_000;
        let mut buf = [0.0; 2];
        let (mut s0, mut s1, mut s01) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            mvn.sample_into(&mut rng, &mut buf);
            s0 += (buf[0] - 1.0).powi(2);
            s1 += (buf[1] + 1.0).powi(2);
            s01 += (buf[0] - 1.0) * (buf[1] + 1.0);
        }
        let n = n as f64;
        assert!((s0 / n - 2.0).abs() < 0.03);
        assert!((s1 / n - 1.0).abs() < 0.02);
        assert!((s01 / n - 0.6).abs() < 0.02);
    }

    #[test]
    fn reproducible_draws() {
        let g = Gamma::new(0.7, 2.0).unwrap();
        assert_eq!(draws(&g, 100, 9), draws(&g, 100, 9));
    }
}
