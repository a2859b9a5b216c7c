//! Built-in verification suite: one check per distributional identity, tail
//! limit or closed-form equivalence the library implements.
//!
//! Every check runs from fixed streams of a single seed, so a report is a
//! pure function of the seed, independent of the worker count.

use std::fmt::Write as _;

use rand::Rng;

use crate::credibility::{
    premium_elliptical, premium_gaussian, premium_gaussian_precision_form, premium_mc, premium_scalar,
    EllipticalShiftModel, GaussianShiftModel, GenericShiftModel,
};
use crate::dirichlet::{
    beta_gamma_sample, independent_y_sample, lp_dirichlet_sample, random_p_sample, random_scale_sequence_sample,
    weighted_sample, LpSpec, RandomPSpec, WeightedSpec,
};
use crate::error::Result;
use crate::radial::RadialLaw;
use crate::stats::special::{beta_cdf, normal_cdf};
use crate::stats::{
    correlation, ks_one_sample, ks_two_sample, with_threads, EmpiricalSample, GofReport, Matrix, RngStream,
};
use crate::tail::{
    archimedean_survival, breiman_convergence_check, mgb2_conditional_sample, mgb2_sample, scale_mixture_exp_sample,
    tail_dependence_grid, ClaytonSpec, Mgb2Model, TailQuery,
};

pub const DEFAULT_SEED: u64 = 42;

/// KS level used by every distributional check.
pub const LEVEL: f64 = 0.01;

/// Outcome of one named check, made of one or more sub-reports.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub parts: Vec<GofReport>,
    /// Set when the check could not run to completion.
    pub error: Option<String>,
}

impl CheckResult {
    pub fn pass(&self) -> bool {
        self.error.is_none() && !self.parts.is_empty() && self.parts.iter().all(|p| p.pass)
    }

    /// The sub-report shown on the check's report line: the first failing
    /// part, otherwise the part closest to its threshold.
    pub fn headline(&self) -> Option<&GofReport> {
        if let Some(f) = self.parts.iter().find(|p| !p.pass) {
            return Some(f);
        }
        let ratio = |p: &GofReport| {
            if p.threshold > 0.0 {
                p.statistic / p.threshold
            } else {
                f64::NEG_INFINITY
            }
        };
        self.parts
            .iter()
            .max_by(|a, b| ratio(a).partial_cmp(&ratio(b)).unwrap_or(std::cmp::Ordering::Equal))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn overall_pass(&self) -> bool {
        self.checks.iter().all(CheckResult::pass)
    }

    /// One line per check: `name,statistic,threshold,pass`, numbers with 17
    /// significant digits.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let (stat, thr) = c
                .headline()
                .map_or((f64::NAN, f64::NAN), |h| (h.statistic, h.threshold));
            writeln!(out, "{},{:.16e},{:.16e},{}", c.name, stat, thr, c.pass()).expect("writing to a String");
        }
        out
    }

    /// Every sub-report, one per line, for diagnostics.
    pub fn render_detailed(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            if let Some(e) = &c.error {
                writeln!(out, "{}: error: {e}", c.name).expect("writing to a String");
            }
            for p in &c.parts {
                writeln!(
                    out,
                    "{}/{}: statistic {:.6e} threshold {:.6e} n {} -> {}",
                    c.name,
                    p.test_name,
                    p.statistic,
                    p.threshold,
                    p.n,
                    if p.pass { "pass" } else { "FAIL" }
                )
                .expect("writing to a String");
            }
        }
        out
    }
}

type CheckFn = fn(u64) -> Result<Vec<GofReport>>;

/// The suite's checks in report order.
pub const CHECKS: [(&str, CheckFn); 14] = [
    ("scalar_credibility_mc", scalar_credibility_mc),
    ("gaussian_premium_forms", gaussian_premium_forms),
    ("elliptical_reduction", elliptical_reduction),
    ("sphere_constraint", sphere_constraint),
    ("beta_marginal_law", beta_marginal_law),
    ("gamma_dirichlet_factorization", gamma_dirichlet_factorization),
    ("scale_cancellation", scale_cancellation),
    ("beta_gamma_algebra", beta_gamma_algebra),
    ("weighted_gaussian_case", weighted_gaussian_case),
    ("random_p_sphere_constraint", random_p_sphere_constraint),
    ("mgb2_sampler_equivalence", mgb2_sampler_equivalence),
    ("clayton_survival_identity", clayton_survival_identity),
    ("breiman_tail_limit", breiman_tail_limit),
    ("determinism", determinism),
];

/// Runs check `index` (0-based, in [`CHECKS`] order).
pub fn run_check(index: usize, seed: u64) -> CheckResult {
    let (name, f) = CHECKS[index];
    match f(seed) {
        Ok(parts) => CheckResult {
            name,
            parts,
            error: None,
        },
        Err(e) => CheckResult {
            name,
            parts: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

pub fn verify_suite(seed: u64) -> VerifyReport {
    VerifyReport {
        seed,
        checks: (0..CHECKS.len()).map(|i| run_check(i, seed)).collect(),
    }
}

/// The full suite at [`DEFAULT_SEED`].
pub fn builtin_verify_suite() -> VerifyReport {
    verify_suite(DEFAULT_SEED)
}

fn stream(seed: u64, check: u64, sub: u64) -> RngStream {
    RngStream::new(seed, (check << 16) | sub)
}

fn es(values: Vec<f64>) -> Result<EmpiricalSample> {
    EmpiricalSample::new(values)
}

fn named(mut r: GofReport, name: String) -> GofReport {
    r.test_name = name;
    r
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn random_matrix(d: usize, rng: &mut RngStream) -> Matrix {
    Matrix::new(d, d, (0..d * d).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("finite entries")
}

fn random_spd(d: usize, rng: &mut RngStream) -> Matrix {
    let a = random_matrix(d, rng);
    a.matmul(&a.transpose())
        .and_then(|m| m.add(&Matrix::identity(d).scale(0.5)))
        .expect("conformable")
}

/// Well-conditioned square matrix: identity-dominated plus noise.
fn random_factor(d: usize, rng: &mut RngStream) -> Matrix {
    random_matrix(d, rng)
        .scale(0.5)
        .add(&Matrix::identity(d).scale(1.5))
        .expect("conformable")
}

const ALPHAS5: [f64; 5] = [0.5, 1.0, 1.5, 2.0, 2.5];

fn scalar_credibility_mc(seed: u64) -> Result<Vec<GofReport>> {
    let (mu, sigma2, tau2, x) = (0.0, 1.0, 3.0, 4.0);
    let closed = premium_scalar(mu, sigma2, tau2, x)?;
    let g = GaussianShiftModel::new(vec![mu], Matrix::diagonal(&[sigma2]), Matrix::diagonal(&[tau2]))?;
    let n = 1_000_000;
    let est = premium_mc(&GenericShiftModel::from_gaussian(&g)?, &[x], n, &stream(seed, 1, 0))?;
    Ok(vec![
        GofReport::new("closed_form_is_3", (closed - 3.0).abs(), 1e-12, 1),
        GofReport::new(
            "mc_within_3_se",
            (est.estimate[0] - closed).abs(),
            3.0 * est.std_error[0],
            n,
        ),
    ])
}

fn gaussian_premium_forms(seed: u64) -> Result<Vec<GofReport>> {
    let mut rng = stream(seed, 2, 0);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mu: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
        let g = GaussianShiftModel::new(mu, random_spd(3, &mut rng), random_spd(3, &mut rng))?;
        let a = premium_gaussian(&g, &x)?;
        let b = premium_gaussian_precision_form(&g, &x)?;
        worst = worst.max(max_abs_diff(&a, &b));
    }
    Ok(vec![GofReport::new("max_entry_diff", worst, 1e-10, 20)])
}

fn elliptical_reduction(seed: u64) -> Result<Vec<GofReport>> {
    let d = 3;
    let mut rng = stream(seed, 3, 0);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (cii, cjj) = (random_factor(d, &mut rng), random_factor(d, &mut rng));
        let mut c = Matrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                c.set(i, j, cii.get(i, j));
                c.set(d + i, d + j, cjj.get(i, j));
            }
        }
        let mu: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let sigma = cii.transpose().matmul(&cii)?;
        let sigma0 = cjj.transpose().matmul(&cjj)?;
        let g = GaussianShiftModel::new(mu.clone(), sigma, sigma0)?;
        let nu: Vec<f64> = std::iter::repeat_n(0.0, d).chain(mu).collect();
        let e = EllipticalShiftModel::new(c, nu, RadialLaw::chi_square_sqrt((2 * d) as f64)?)?;
        worst = worst.max(max_abs_diff(&premium_elliptical(&e, &x)?, &premium_gaussian(&g, &x)?));
    }
    Ok(vec![GofReport::new("max_entry_diff", worst, 1e-9, 20)])
}

fn sphere_constraint(seed: u64) -> Result<Vec<GofReport>> {
    let spec = LpSpec::new(ALPHAS5.to_vec(), 3.0)?;
    let n = 100_000;
    let s = lp_dirichlet_sample(&spec, &RadialLaw::point_mass(1.0)?, n, &stream(seed, 4, 0))?;
    Ok(vec![GofReport::new(
        "max_sphere_residual",
        s.sphere_residual(),
        1e-12,
        n,
    )])
}

fn beta_marginal_law(seed: u64) -> Result<Vec<GofReport>> {
    let n = 10_000;
    let mut parts = Vec::new();
    for (k, p) in [1.0, 2.7].into_iter().enumerate() {
        let spec = LpSpec::new(ALPHAS5.to_vec(), p)?;
        let s = lp_dirichlet_sample(&spec, &RadialLaw::point_mass(1.0)?, n, &stream(seed, 5, k as u64))?;
        let total = spec.alpha_sum();
        for (i, &a) in ALPHAS5.iter().enumerate() {
            let powers = s.angular.column(i).iter().map(|o| o.powf(p)).collect();
            let r = ks_one_sample(&es(powers)?, |u| beta_cdf(a, total - a, u), LEVEL)?;
            parts.push(named(r, format!("ks_p{p}_o{}", i + 1)));
        }
    }
    Ok(parts)
}

fn independence_parts(values: &Matrix, p: f64, prefix: &str) -> Vec<GofReport> {
    let n = values.rows();
    let cols: Vec<Vec<f64>> = (0..values.cols())
        .map(|j| values.column(j).iter().map(|v| v.powf(p)).collect())
        .collect();
    let limit = 3.0 / (n as f64).sqrt();
    let mut out = Vec::new();
    for i in 0..cols.len() {
        for j in 0..i {
            out.push(GofReport::new(
                format!("{prefix}_corr_{}_{}", j + 1, i + 1),
                correlation(&cols[i], &cols[j]).abs(),
                limit,
                n,
            ));
        }
    }
    out
}

fn gamma_dirichlet_factorization(seed: u64) -> Result<Vec<GofReport>> {
    let p = 3.0;
    let spec = LpSpec::new(ALPHAS5.to_vec(), p)?;
    let n = 10_000;
    let radial = RadialLaw::gamma_power(spec.alpha_sum(), 1.0 / p, 1.0 / p)?;
    let x = lp_dirichlet_sample(&spec, &radial, n, &stream(seed, 6, 0))?.values;
    let y = independent_y_sample(&spec, n, &stream(seed, 6, 1))?;
    let mut parts = Vec::new();
    for i in 0..spec.dim() {
        let r = ks_two_sample(&es(x.column(i))?, &es(y.column(i))?, LEVEL)?;
        parts.push(named(r, format!("ks_margin_{}", i + 1)));
    }
    parts.extend(independence_parts(&x, p, "pow"));
    Ok(parts)
}

fn scale_cancellation(seed: u64) -> Result<Vec<GofReport>> {
    let (alpha, p, n) = (1.5, 2.0, 10_000);
    let ratio = |m: &Matrix| m.iter_rows().map(|r| r[0] / r[1]).collect::<Vec<_>>();
    let a = random_scale_sequence_sample(alpha, p, &RadialLaw::point_mass(1.0)?, 2, n, &stream(seed, 7, 0))?;
    let b = random_scale_sequence_sample(alpha, p, &RadialLaw::pareto(3.0)?, 2, n, &stream(seed, 7, 1))?;
    let r = ks_two_sample(&es(ratio(&a))?, &es(ratio(&b))?, LEVEL)?;
    Ok(vec![named(r, "ks_ratio_x1_x2".into())])
}

fn beta_gamma_algebra(seed: u64) -> Result<Vec<GofReport>> {
    let n = 10_000;
    let mut parts = Vec::new();
    for (k, (alpha, p)) in [(0.5, 1.0), (0.5, 2.0), (0.2, 3.0)].into_iter().enumerate() {
        let k = k as u64;
        let bg = beta_gamma_sample(alpha, p, n, &stream(seed, 8, 2 * k))?;
        let y = independent_y_sample(&LpSpec::new(vec![alpha], p)?, n, &stream(seed, 8, 2 * k + 1))?;
        let r = ks_two_sample(&es(bg)?, &es(y.column(0))?, LEVEL)?;
        parts.push(named(r, format!("ks_alpha{alpha}_p{p}")));
    }
    Ok(parts)
}

fn weighted_gaussian_case(seed: u64) -> Result<Vec<GofReport>> {
    let d = 4;
    let n = 10_000;
    let spec = WeightedSpec::new(LpSpec::new(vec![2.0; d], 2.0)?, vec![0.5; d])?;
    let s = weighted_sample(&spec, &RadialLaw::chi_square_sqrt(d as f64)?, n, &stream(seed, 9, 0))?;
    let mut parts = Vec::new();
    for i in 0..d {
        let r = ks_one_sample(&es(s.values.column(i))?, normal_cdf, LEVEL)?;
        parts.push(named(r, format!("ks_normal_{}", i + 1)));
    }
    parts.extend(independence_parts(&s.values, 1.0, "x"));
    Ok(parts)
}

fn random_p_sphere_constraint(seed: u64) -> Result<Vec<GofReport>> {
    let n = 10_000;
    let spec = RandomPSpec::new(vec![0.5, 1.0, 2.0], RadialLaw::pareto(2.0)?)?;
    let s = random_p_sample(&spec, &RadialLaw::gamma_power(2.0, 1.0, 1.0)?, n, &stream(seed, 10, 0))?;
    Ok(vec![GofReport::new(
        "max_sphere_residual",
        s.sphere_residual(),
        1e-12,
        n,
    )])
}

fn mgb2_sampler_equivalence(seed: u64) -> Result<Vec<GofReport>> {
    let n = 10_000;
    let model = Mgb2Model::new(
        vec![2.0, 3.0],
        vec![1.0, 2.0],
        vec![1.5, 0.5],
        RadialLaw::inv_gamma(2.0)?,
    )?;
    let a = mgb2_sample(&model, n, &stream(seed, 11, 0))?;
    let b = mgb2_conditional_sample(&model, n, &stream(seed, 11, 1))?;
    let mut parts = Vec::new();
    for i in 0..2 {
        let r = ks_two_sample(&es(a.column(i))?, &es(b.column(i))?, LEVEL)?;
        parts.push(named(r, format!("ks_margin_{}", i + 1)));
    }
    let min = |m: &Matrix| m.iter_rows().map(|r| r[0].min(r[1])).collect::<Vec<_>>();
    let r = ks_two_sample(&es(min(&a))?, &es(min(&b))?, LEVEL)?;
    parts.push(named(r, "ks_min".into()));
    Ok(parts)
}

fn clayton_survival_identity(seed: u64) -> Result<Vec<GofReport>> {
    let n = 100_000;
    let spec = ClaytonSpec::new(1.0, 2)?;
    let x = scale_mixture_exp_sample(&spec, n, &stream(seed, 12, 0))?;
    let grid = [0.25, 0.5, 1.0];
    let mut parts = Vec::new();
    for &u in &grid {
        for &v in &grid {
            let emp = x.iter_rows().filter(|r| r[0] > u && r[1] > v).count() as f64 / n as f64;
            let exact = archimedean_survival(&spec, &[u, v])?;
            parts.push(GofReport::new(
                format!("survival_{u}_{v}"),
                (emp - exact).abs(),
                0.01,
                n,
            ));
        }
    }
    Ok(parts)
}

fn breiman_tail_limit(seed: u64) -> Result<Vec<GofReport>> {
    let model = Mgb2Model::new(vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0], RadialLaw::pareto(1.0)?)?;
    let exact = 0.5;
    let grid = tail_dependence_grid(&model, &[(1.0, 1.0), (2.0, 2.0)], 1_000_000, &stream(seed, 13, 0))?;
    let (i11, i22) = (grid[0], grid[1]);
    let query = TailQuery::new(1.0, 1.0, vec![1.0, 2.0, 5.0, 10.0, 20.0], 10_000_000)?;
    let conv = breiman_convergence_check(&model, &query, &stream(seed, 13, 1))?;
    let at20 = conv.rows.iter().find(|r| r.t == 20.0).expect("t = 20 is on the grid");
    Ok(vec![
        GofReport::new("limit_within_2pct", (i11.value - exact).abs(), 0.02 * exact, 1_000_000),
        GofReport::new(
            "ratio_t20_within_10pct",
            (at20.ratio.value - exact).abs(),
            0.1 * exact,
            query.n,
        ),
        GofReport::new("positivity", 3.0 * i11.std_error - i11.value, 0.0, 1_000_000),
        GofReport::new(
            "homogeneity",
            (i22.value - 0.5 * i11.value).abs(),
            1e-12 * i11.value,
            1_000_000,
        ),
        conv.report,
    ])
}

/// Bitwise fingerprint of a handful of parallel samplers and estimators.
fn fingerprint(seed: u64) -> Result<Vec<u64>> {
    let rng = stream(seed, 14, 0);
    let mut bits = Vec::new();
    let spec = LpSpec::new(ALPHAS5.to_vec(), 3.0)?;
    let s = lp_dirichlet_sample(&spec, &RadialLaw::pareto(2.0)?, 20_000, &rng.substream(0))?;
    bits.extend(s.values.as_slice().iter().map(|v| v.to_bits()));
    let model = Mgb2Model::new(
        vec![2.0, 3.0],
        vec![1.0, 2.0],
        vec![1.5, 0.5],
        RadialLaw::inv_gamma(2.0)?,
    )?;
    let m = mgb2_sample(&model, 20_000, &rng.substream(1))?;
    bits.extend(m.as_slice().iter().map(|v| v.to_bits()));
    let g = GaussianShiftModel::new(vec![0.0], Matrix::diagonal(&[1.0]), Matrix::diagonal(&[3.0]))?;
    let mc = premium_mc(
        &GenericShiftModel::from_gaussian(&g)?,
        &[4.0],
        50_000,
        &rng.substream(2),
    )?;
    bits.extend(mc.estimate.iter().chain(&mc.std_error).map(|v| v.to_bits()));
    let tail = Mgb2Model::new(vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0], RadialLaw::pareto(1.0)?)?;
    let est = tail_dependence_grid(&tail, &[(1.0, 1.0)], 50_000, &rng.substream(3))?;
    bits.extend([est[0].value.to_bits(), est[0].std_error.to_bits()]);
    Ok(bits)
}

fn determinism(seed: u64) -> Result<Vec<GofReport>> {
    let one = with_threads(1, || fingerprint(seed))?;
    let four = with_threads(4, || fingerprint(seed))?;
    let again = with_threads(4, || fingerprint(seed))?;
    let mismatches = |a: &[u64], b: &[u64]| {
        if a.len() != b.len() {
            return a.len().max(b.len()) as f64;
        }
        a.iter().zip(b).filter(|(x, y)| x != y).count() as f64
    };
    Ok(vec![
        GofReport::new("workers_1_vs_4", mismatches(&one, &four), 0.0, one.len()),
        GofReport::new("repeat_run", mismatches(&four, &again), 0.0, one.len()),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_rendering() {
        let report = VerifyReport {
            seed: 1,
            checks: vec![
                CheckResult {
                    name: "a",
                    parts: vec![GofReport::new("x", 0.5, 1.0, 10), GofReport::new("y", 0.9, 1.0, 10)],
                    error: None,
                },
                CheckResult {
                    name: "b",
                    parts: vec![GofReport::new("x", 0.1, 1.0, 10), GofReport::new("y", 2.0, 1.0, 10)],
                    error: None,
                },
                CheckResult {
                    name: "c",
                    parts: vec![],
                    error: Some("boom".into()),
                },
            ],
        };
        let text = report.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "a,9.0000000000000002e-1,1.0000000000000000e0,true");
        assert_eq!(lines[1], "b,2.0000000000000000e0,1.0000000000000000e0,false");
        assert!(lines[2].starts_with("c,NaN,NaN,false"));
        assert!(!report.overall_pass());
        assert!(report.render_detailed().contains("c: error: boom"));
    }

    #[test]
    fn fast_checks_pass() {
        // gaussian forms, elliptical reduction, sphere constraint, random-P sphere
        for i in [1, 2, 3, 9] {
            let c = run_check(i, DEFAULT_SEED);
            assert!(c.pass(), "{c:?}");
        }
    }
}
