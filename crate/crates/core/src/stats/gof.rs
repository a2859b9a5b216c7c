//! Kolmogorov-Smirnov goodness-of-fit tests and simple sample statistics.

use std::cmp::Ordering;

use crate::error::{param, Result};

/// Minimum sample size accepted by the KS tests.
pub const KS_MIN_N: usize = 10;

/// A finite, non-empty sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(param("empirical sample is empty"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(param(format!("sample value {i} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn sorted(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        v
    }
}

/// Outcome of one statistical or numerical check; `pass ⇔ statistic <= threshold`.
#[derive(Debug, Clone, PartialEq)]
pub struct GofReport {
    pub test_name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub n: usize,
}

impl GofReport {
    pub fn new(test_name: impl Into<String>, statistic: f64, threshold: f64, n: usize) -> Self {
        Self {
            test_name: test_name.into(),
            statistic,
            threshold,
            // NaN statistics never pass
            pass: statistic <= threshold,
            n,
        }
    }
}

/// Asymptotic Kolmogorov critical value `c(level)` with `P(K > c) = level`.
pub fn ks_critical_value(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(param(format!("level must lie in (0, 1), got {level}")));
    }
    if level == 0.01 {
        return Ok(1.628);
    }
    if level == 0.05 {
        return Ok(1.358);
    }
    // Kolmogorov survival is decreasing in c; bisect.
    let (mut lo, mut hi) = (0.2f64, 6.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_survival(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `P(K > c) = 2 Σ_{k>=1} (-1)^(k-1) exp(-2 k² c²)`.
pub fn kolmogorov_survival(c: f64) -> f64 {
    if c <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * c * c).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS test of `x` against the continuous cdf `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(x: &EmpiricalSample, cdf: F, level: f64) -> Result<GofReport> {
    let n = x.n();
    if n < KS_MIN_N {
        return Err(param(format!("KS test needs at least {KS_MIN_N} values, got {n}")));
    }
    let c = ks_critical_value(level)?;
    let nf = n as f64;
    let d = x.sorted().iter().enumerate().fold(0.0f64, |acc, (i, &v)| {
        let f = cdf(v);
        let above = (i as f64 + 1.0) / nf - f;
        let below = f - i as f64 / nf;
        acc.max(above).max(below)
    });
    Ok(GofReport::new("ks_one_sample", d, c / nf.sqrt(), n))
}

/// Two-sample KS test. Ties across samples are handled by advancing both
/// empirical cdfs past the tied value before comparing.
pub fn ks_two_sample(x: &EmpiricalSample, y: &EmpiricalSample, level: f64) -> Result<GofReport> {
    let (n, m) = (x.n(), y.n());
    if n < KS_MIN_N || m < KS_MIN_N {
        return Err(param(format!(
            "KS test needs at least {KS_MIN_N} values per sample, got {n} and {m}"
        )));
    }
    let c = ks_critical_value(level)?;
    let xs = x.sorted();
    let ys = y.sorted();
    let (nf, mf) = (n as f64, m as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / nf - j as f64 / mf).abs());
    }
    let threshold = c * ((nf + mf) / (nf * mf)).sqrt();
    Ok(GofReport::new("ks_two_sample", d, threshold, n + m))
}

/// Pearson correlation of two equal-length slices.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "correlation needs equal lengths");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    sxy / (sxx * syy).sqrt()
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}
