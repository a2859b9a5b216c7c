//! Dispatch of a validated [`RunConfig`] to the model modules.

use std::fmt::Write as _;

use riskscale::verify::verify_suite;
use riskscale::{
    beta_gamma_sample, breiman_convergence_check, lp_dirichlet_sample, mgb2_conditional_sample, mgb2_sample,
    premium_elliptical, premium_gaussian, premium_gaussian_precision_form, premium_mc, premium_scalar, random_p_sample,
    random_scale_sequence_sample, scale_mixture_exp_sample, weighted_sample, DirichletSample, GenericShiftModel,
    Matrix, RngStream,
};

use crate::config::{Command, Mgb2Sampler, Model, PremiumMethod, RunConfig};

/// Self-audit tolerance for the unit-sphere constraint.
pub const SPHERE_TOLERANCE: f64 = 1e-12;

/// Root stream ids, one per command, so that the commands never share draws.
const SAMPLE_STREAM: u64 = 1;
const PREMIUM_STREAM: u64 = 2;
const TAILDEP_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// File contents (CSV, or the verify report).
    pub text: String,
    /// False when a verify check or a requested audit failed.
    pub passed: bool,
    /// Human-readable notes for stderr, one per line.
    pub notes: Vec<String>,
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn header(out: &mut String, prefix: &str, d: usize) {
    let cols: Vec<String> = (1..=d).map(|i| format!("{prefix}{i}")).collect();
    out.push_str(&cols.join(","));
}

fn write_rows<'a>(out: &mut String, rows: impl Iterator<Item = &'a [f64]>) {
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
}

fn matrix_csv(m: &Matrix) -> String {
    let mut out = String::new();
    header(&mut out, "x", m.cols());
    out.push('\n');
    write_rows(&mut out, m.iter_rows());
    out
}

struct Audit {
    passed: bool,
    notes: Vec<String>,
}

impl Audit {
    fn new() -> Self {
        Audit {
            passed: true,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, what: &str, value: f64, limit: f64) {
        let ok = value <= limit;
        self.passed &= ok;
        self.notes.push(format!(
            "audit {what}: {value:.3e} (limit {limit:.3e}) {}",
            if ok { "ok" } else { "FAILED" }
        ));
    }

    fn finite(&mut self, values: &[f64], positive: bool) {
        let bad = values
            .iter()
            .filter(|v| !v.is_finite() || (positive && **v <= 0.0))
            .count();
        let what = if positive {
            "non-positive or non-finite values"
        } else {
            "non-finite values"
        };
        self.check(what, bad as f64, 0.0);
    }

    fn dirichlet(&mut self, s: &DirichletSample) {
        self.check("sphere residual", s.sphere_residual(), SPHERE_TOLERANCE);
        self.check("radial residual", s.radial_residual(), SPHERE_TOLERANCE);
    }
}

pub fn run(config: &RunConfig) -> riskscale::Result<RunOutput> {
    let mut audit = Audit::new();
    let text = match config.command {
        Command::Verify => {
            let report = verify_suite(config.seed);
            let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass()).collect();
            audit.passed = failed.is_empty();
            audit.notes.push(format!(
                "verify: {}/{} checks passed",
                report.checks.len() - failed.len(),
                report.checks.len()
            ));
            for c in failed {
                audit.notes.push(format!("verify: check `{}` failed", c.name));
            }
            report.render()
        }
        Command::Sample => sample(config, &mut audit)?,
        Command::Premium => premium(config, &mut audit)?,
        Command::TailDep => taildep(config, &mut audit)?,
    };
    let audited = config.audit || config.command == Command::Verify;
    Ok(RunOutput {
        text,
        passed: !audited || audit.passed,
        notes: if audited { audit.notes } else { Vec::new() },
    })
}

fn sample(config: &RunConfig, audit: &mut Audit) -> riskscale::Result<String> {
    let rng = RngStream::new(config.seed, SAMPLE_STREAM);
    let n = config.n.expect("sample configs carry n");
    let values = match &config.model {
        Model::LpDirichlet { spec, radial } => {
            let s = lp_dirichlet_sample(spec, radial, n, &rng)?;
            audit.dirichlet(&s);
            s.values
        }
        Model::WeightedLpDirichlet { spec, radial } => {
            let s = weighted_sample(spec, radial, n, &rng)?;
            audit.dirichlet(&s);
            s.values
        }
        Model::RandomPDirichlet { spec, radial } => {
            let s = random_p_sample(spec, radial, n, &rng)?;
            audit.dirichlet(&s);
            s.values
        }
        Model::RandomScale { alpha, p, s_law, d } => {
            let m = random_scale_sequence_sample(*alpha, *p, s_law, *d, n, &rng)?;
            audit.finite(m.as_slice(), true);
            m
        }
        Model::BetaGamma { alpha, p } => {
            let v = beta_gamma_sample(*alpha, *p, n, &rng)?;
            audit.finite(&v, true);
            Matrix::new(n, 1, v)?
        }
        Model::Clayton(spec) => {
            let m = scale_mixture_exp_sample(spec, n, &rng)?;
            audit.finite(m.as_slice(), true);
            m
        }
        Model::Mgb2 { model, sampler } => {
            let m = match sampler {
                Mgb2Sampler::Scale => mgb2_sample(model, n, &rng)?,
                Mgb2Sampler::Conditional => mgb2_conditional_sample(model, n, &rng)?,
            };
            audit.finite(m.as_slice(), true);
            m
        }
        other => unreachable!("parser admits no `{}` sample model", other.kind()),
    };
    Ok(matrix_csv(&values))
}

fn premium(config: &RunConfig, audit: &mut Audit) -> riskscale::Result<String> {
    let mut out = String::new();
    match &config.model {
        Model::Scalar { mu, sigma2, tau2, x } => {
            let v = premium_scalar(*mu, *sigma2, *tau2, *x)?;
            audit.finite(&[v], false);
            out.push_str("x1\n");
            write_rows(&mut out, std::iter::once(&[v][..]));
        }
        Model::GaussianShift { model, x, method } => {
            let closed = premium_gaussian(model, x)?;
            match method {
                PremiumMethod::Closed => {
                    let other = premium_gaussian_precision_form(model, x)?;
                    let scale = closed.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                    let diff = closed.iter().zip(&other).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                    audit.check("closed forms disagree by", diff, 1e-10 * scale);
                    header(&mut out, "x", closed.len());
                    out.push('\n');
                    write_rows(&mut out, std::iter::once(&closed[..]));
                }
                PremiumMethod::MonteCarlo => {
                    let n = config.n.expect("mc configs carry n");
                    let rng = RngStream::new(config.seed, PREMIUM_STREAM);
                    let est = premium_mc(&GenericShiftModel::from_gaussian(model)?, x, n, &rng)?;
                    for (i, ((e, se), c)) in est.estimate.iter().zip(&est.std_error).zip(&closed).enumerate() {
                        audit.check(&format!("x{} distance to closed form", i + 1), (e - c).abs(), 3.0 * se);
                    }
                    header(&mut out, "x", closed.len());
                    out.push(',');
                    header(&mut out, "se", closed.len());
                    out.push('\n');
                    let row: Vec<f64> = est.estimate.iter().chain(&est.std_error).copied().collect();
                    write_rows(&mut out, std::iter::once(&row[..]));
                }
            }
        }
        Model::EllipticalShift { model, x } => {
            let v = premium_elliptical(model, x)?;
            audit.finite(&v, false);
            header(&mut out, "x", v.len());
            out.push('\n');
            write_rows(&mut out, std::iter::once(&v[..]));
        }
        other => unreachable!("parser admits no `{}` premium model", other.kind()),
    }
    Ok(out)
}

fn taildep(config: &RunConfig, audit: &mut Audit) -> riskscale::Result<String> {
    let Model::TailDep { model, query } = &config.model else {
        unreachable!("parser admits only mgb2 for taildep");
    };
    let rng = RngStream::new(config.seed, TAILDEP_STREAM);
    let conv = breiman_convergence_check(model, query, &rng)?;
    audit.check(
        &format!("tail ratio at t = {} distance to limit", conv.decision_t),
        conv.report.statistic,
        conv.report.threshold,
    );
    let mut out = String::from("t,empirical_ratio,stderr,limit_estimate,limit_stderr\n");
    for r in &conv.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_num(r.t),
            fmt_num(r.ratio.value),
            fmt_num(r.ratio.std_error),
            fmt_num(conv.limit.value),
            fmt_num(conv.limit.std_error)
        )
        .expect("writing to a String");
    }
    Ok(out)
}
