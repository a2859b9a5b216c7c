//! Random-scale dependence models: exponential scale mixtures with an
//! Archimedean survival copula, the MGB2 model, and the joint-tail limit of
//! the MGB2 construction under a regularly varying mixer.

use rand::distr::Distribution;
use rayon::prelude::*;

use crate::error::{ensure_all_positive, ensure_positive, param, Error, Result};
use crate::radial::RadialLaw;
use crate::stats::special::{gamma_pdf, ln_gamma};
use crate::stats::{exp_sample, fill_rows, map_chunks, Gamma, GofReport, Matrix, RngStream};

/// Minimum exceedances of `X_1 > t` for an empirical tail ratio.
pub const MIN_TAIL_EXCEEDANCES: usize = 20;

/// Exceedances required at the threshold the convergence check decides on.
pub const DECISION_EXCEEDANCES: usize = 1000;

/// Scale mixture of unit exponentials `(Y_1/Θ, …, Y_d/Θ)` with `Θ ~ Gamma(a, 1)`.
/// Its joint survival is the Laplace transform of `Θ` at `Σ x_i`, i.e.
/// `(1 + Σ x_i)^(-a)`: a Clayton-type Archimedean survival copula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClaytonSpec {
    theta_shape: f64,
    d: usize,
}

impl ClaytonSpec {
    pub fn new(theta_shape: f64, d: usize) -> Result<Self> {
        ensure_positive("theta_shape", theta_shape)?;
        if d == 0 {
            return Err(param("dimension d must be >= 1"));
        }
        Ok(Self { theta_shape, d })
    }

    pub fn theta_shape(&self) -> f64 {
        self.theta_shape
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

pub fn scale_mixture_exp_sample(spec: &ClaytonSpec, n: usize, rng: &RngStream) -> Result<Matrix> {
    let mixer = Gamma::new(spec.theta_shape, 1.0)?;
    fill_rows(n, spec.d, rng, |chunk, row| {
        let theta = mixer.sample(&mut chunk.aux);
        for x in row.iter_mut() {
            *x = exp_sample(&mut chunk.main) / theta;
        }
        Ok(())
    })
}

/// `P(X_1 > x_1, …, X_d > x_d) = (1 + Σ x_i)^(-a)`.
pub fn archimedean_survival(spec: &ClaytonSpec, x: &[f64]) -> Result<f64> {
    if x.len() != spec.d {
        return Err(Error::Shape(format!(
            "expected {} coordinates, got {}",
            spec.d,
            x.len()
        )));
    }
    if let Some(i) = x.iter().position(|&v| v.is_nan() || v < 0.0) {
        return Err(param(format!("x[{i}] must be >= 0")));
    }
    Ok((1.0 + x.iter().sum::<f64>()).powf(-spec.theta_shape))
}

/// MGB2 random scale model `X_i = Θ^(1/a_i) W_i` with independent
/// `W_i^(a_i) ~ Gamma(p_i, b_i^(-a_i))` and `Θ ~ theta_law` independent of `W`.
#[derive(Debug, Clone)]
pub struct Mgb2Model {
    a: Vec<f64>,
    b: Vec<f64>,
    p: Vec<f64>,
    theta_law: RadialLaw,
    unit_gammas: Vec<Gamma>,
}

impl Mgb2Model {
    pub fn new(a: Vec<f64>, b: Vec<f64>, p: Vec<f64>, theta_law: RadialLaw) -> Result<Self> {
        ensure_all_positive("a", &a)?;
        ensure_all_positive("b", &b)?;
        ensure_all_positive("p", &p)?;
        if a.len() != b.len() || a.len() != p.len() {
            return Err(Error::Shape(format!(
                "a, b and p must have equal lengths, got {}, {} and {}",
                a.len(),
                b.len(),
                p.len()
            )));
        }
        theta_law.validate()?;
        let unit_gammas = p.iter().map(|&pi| Gamma::new(pi, 1.0)).collect::<Result<_>>()?;
        Ok(Self {
            a,
            b,
            p,
            theta_law,
            unit_gammas,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn theta_law(&self) -> &RadialLaw {
        &self.theta_law
    }

    /// `W_i = b_i G^(1/a_i)` with `G ~ Gamma(p_i, 1)`; equivalent to
    /// `W_i^(a_i) ~ Gamma(p_i, b_i^(-a_i))`.
    #[inline]
    fn draw_w<R: rand::Rng + ?Sized>(&self, i: usize, rng: &mut R) -> f64 {
        self.b[i] * self.unit_gammas[i].sample(rng).powf(1.0 / self.a[i])
    }
}

/// The ingredients `Θ` and `W` of an MGB2 sample.
#[derive(Debug, Clone)]
pub struct Mgb2Draws {
    pub a: Vec<f64>,
    pub theta: Vec<f64>,
    pub w: Matrix,
}

impl Mgb2Draws {
    /// Scale form `X_i = Θ^(1/a_i) W_i`.
    pub fn scale_form(&self) -> Matrix {
        self.combine(|theta, a, w| theta.powf(1.0 / a) * w)
    }

    /// Log-shift form `ln X_i = (1/a_i) ln Θ + ln W_i`.
    pub fn log_shift_form(&self) -> Matrix {
        self.combine(|theta, a, w| theta.ln() / a + w.ln())
    }

    fn combine(&self, f: impl Fn(f64, f64, f64) -> f64) -> Matrix {
        let k = self.a.len();
        let data = self
            .w
            .iter_rows()
            .zip(&self.theta)
            .flat_map(|(row, &theta)| row.iter().zip(&self.a).map(move |(&w, &a)| (theta, a, w)))
            .map(|(theta, a, w)| f(theta, a, w))
            .collect();
        Matrix::from_raw(self.theta.len(), k, data)
    }
}

pub fn mgb2_draws(model: &Mgb2Model, n: usize, rng: &RngStream) -> Result<Mgb2Draws> {
    let k = model.dim();
    let raw = fill_rows(n, k + 1, rng, |chunk, row| {
        row[k] = model.theta_law.sample(&mut chunk.aux)?;
        for i in 0..k {
            row[i] = model.draw_w(i, &mut chunk.main);
        }
        Ok(())
    })?;
    let theta = raw.column(k);
    let w = Matrix::from_raw(n, k, raw.iter_rows().flat_map(|r| r[..k].iter().copied()).collect());
    Ok(Mgb2Draws {
        a: model.a.clone(),
        theta,
        w,
    })
}

/// `n` rows of `(Θ^(1/a_1) W_1, …, Θ^(1/a_k) W_k)`.
pub fn mgb2_sample(model: &Mgb2Model, n: usize, rng: &RngStream) -> Result<Matrix> {
    let k = model.dim();
    fill_rows(n, k, rng, |chunk, row| {
        let theta = model.theta_law.sample(&mut chunk.aux)?;
        for (i, x) in row.iter_mut().enumerate() {
            *x = theta.powf(1.0 / model.a[i]) * model.draw_w(i, &mut chunk.main);
        }
        Ok(())
    })
}

/// Conditional construction: draw `θ`, then independently
/// `U_i ~ Gamma(p_i, rate 1/θ)` and `X_i = b_i U_i^(1/a_i)`.
pub fn mgb2_conditional_sample(model: &Mgb2Model, n: usize, rng: &RngStream) -> Result<Matrix> {
    let k = model.dim();
    fill_rows(n, k, rng, |chunk, row| {
        let theta = model.theta_law.sample(&mut chunk.aux)?;
        for (i, x) in row.iter_mut().enumerate() {
            let u = Gamma::new(model.p[i], 1.0 / theta)?.sample(&mut chunk.main);
            *x = model.b[i] * u.powf(1.0 / model.a[i]);
        }
        Ok(())
    })
}

/// Conditional MGB2 density
/// `a / (Γ(p) x θ^p) · (x/b)^(a p) · exp(−(x/b)^a / θ)`.
pub fn mgb2_conditional_pdf(x: f64, theta: f64, a: f64, b: f64, p: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = x / b;
    (a.ln() - ln_gamma(p) - x.ln() - p * theta.ln() + a * p * z.ln() - z.powf(a) / theta).exp()
}

/// Density of `X = b U^(1/a)` for `U ~ Gamma(p, rate 1/θ)`, by change of
/// variables: `f_U((x/b)^a) · a (x/b)^a / x`.
pub fn mgb2_conditional_pdf_via_gamma(x: f64, theta: f64, a: f64, b: f64, p: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let u = (x / b).powf(a);
    gamma_pdf(p, 1.0 / theta, u) * a * u / x
}

/// A ratio estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Empirical `P(X_1 > c1 t, X_2 > c2 t) / P(X_1 > t)` from the first two
/// columns of `samples`, with a delta-method standard error for the ratio of
/// counts. It reduces to the binomial `sqrt(r(1−r)/m)` when the joint event
/// is contained in `{X_1 > t}`.
pub fn tail_ratio_empirical(samples: &Matrix, c1: f64, c2: f64, t: f64) -> Result<(TailEstimate, usize)> {
    if samples.cols() < 2 {
        return Err(Error::Shape("tail ratio needs at least two columns".into()));
    }
    ensure_positive("c1", c1)?;
    ensure_positive("c2", c2)?;
    ensure_positive("t", t)?;
    let (u1, u2) = (c1 * t, c2 * t);
    let (mut joint, mut marg, mut both) = (0usize, 0usize, 0usize);
    for row in samples.iter_rows() {
        let a = row[0] > u1 && row[1] > u2;
        let b = row[0] > t;
        joint += a as usize;
        marg += b as usize;
        both += (a && b) as usize;
    }
    if marg < MIN_TAIL_EXCEEDANCES {
        return Err(Error::InsufficientTailData {
            threshold: t,
            found: marg,
            needed: MIN_TAIL_EXCEEDANCES,
        });
    }
    let m = marg as f64;
    let r = joint as f64 / m;
    let var_num = joint as f64 - 2.0 * r * both as f64 + r * r * m;
    Ok((
        TailEstimate {
            value: r,
            std_error: var_num.max(0.0).sqrt() / m,
        },
        marg,
    ))
}

/// Checks the model is in the class the joint-tail limit is stated for and
/// returns `(a, q)`.
fn tail_limit_params(model: &Mgb2Model) -> Result<(f64, f64)> {
    if model.dim() < 2 {
        return Err(Error::UnsupportedModel(
            "the joint-tail limit needs two coordinates".into(),
        ));
    }
    let (a1, a2) = (model.a[0], model.a[1]);
    if a1 != a2 {
        return Err(Error::UnsupportedModel(format!(
            "joint-tail limit requires a_1 = a_2, got {a1} and {a2}"
        )));
    }
    let q = model.theta_law.tail_index().ok_or_else(|| {
        Error::UnsupportedModel(format!(
            "theta law {} is not regularly varying with a known index",
            model.theta_law
        ))
    })?;
    // W_i are Gamma powers, so E[W^(aq)] is finite for every aq > 0.
    Ok((a1, q))
}

/// Monte Carlo estimates of
/// `I(c1, c2) = E[min(W_1/c1, W_2/c2)^(aq)] / E[W_1^(aq)]` for each pair in
/// `cs`, all computed from one shared set of `W` draws.
pub fn tail_dependence_grid(
    model: &Mgb2Model,
    cs: &[(f64, f64)],
    n: usize,
    rng: &RngStream,
) -> Result<Vec<TailEstimate>> {
    let (a, q) = tail_limit_params(model)?;
    for &(c1, c2) in cs {
        ensure_positive("c1", c1)?;
        ensure_positive("c2", c2)?;
    }
    let aq = a * q;
    let k = cs.len();
    // per chunk: Σ w, Σ w², and per pair Σ m, Σ m², Σ m w
    let parts = map_chunks(n, rng, |range, chunk| {
        let mut acc = vec![0.0; 2 + 3 * k];
        for _ in range {
            let w1 = model.draw_w(0, &mut chunk.main);
            let w2 = model.draw_w(1, &mut chunk.main);
            let den = w1.powf(aq);
            acc[0] += den;
            acc[1] += den * den;
            for (j, &(c1, c2)) in cs.iter().enumerate() {
                let m = (w1 / c1).min(w2 / c2).powf(aq);
                acc[2 + 3 * j] += m;
                acc[3 + 3 * j] += m * m;
                acc[4 + 3 * j] += m * den;
            }
        }
        Ok(acc)
    })?;
    let mut tot = vec![0.0; 2 + 3 * k];
    for p in &parts {
        for (t, v) in tot.iter_mut().zip(p) {
            *t += v;
        }
    }
    let nf = n as f64;
    let (ed, edd) = (tot[0] / nf, tot[1] / nf);
    Ok((0..k)
        .map(|j| {
            let (em, emm, emd) = (tot[2 + 3 * j] / nf, tot[3 + 3 * j] / nf, tot[4 + 3 * j] / nf);
            let r = em / ed;
            // var(m − r·den) / (n · E[den]²)
            let var = (emm - 2.0 * r * emd + r * r * edd) - (em - r * ed).powi(2);
            TailEstimate {
                value: r,
                std_error: (var.max(0.0) / nf).sqrt() / ed,
            }
        })
        .collect())
}

/// Monte Carlo estimate of the joint-tail dependence function `I(c1, c2)`.
pub fn tail_dependence_limit(model: &Mgb2Model, c1: f64, c2: f64, n: usize, rng: &RngStream) -> Result<TailEstimate> {
    Ok(tail_dependence_grid(model, &[(c1, c2)], n, rng)?[0])
}

/// Thresholds and constants for [`breiman_convergence_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct TailQuery {
    pub c1: f64,
    pub c2: f64,
    pub t_grid: Vec<f64>,
    pub n: usize,
}

impl TailQuery {
    pub fn new(c1: f64, c2: f64, t_grid: Vec<f64>, n: usize) -> Result<Self> {
        ensure_positive("c1", c1)?;
        ensure_positive("c2", c2)?;
        ensure_all_positive("t_grid", &t_grid)?;
        if t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(param("t_grid must be strictly increasing"));
        }
        if n == 0 {
            return Err(param("n must be >= 1"));
        }
        Ok(Self { c1, c2, t_grid, n })
    }
}

/// One row of the prelimit-versus-limit table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRow {
    pub t: f64,
    pub ratio: TailEstimate,
    pub exceedances: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailConvergence {
    pub rows: Vec<TailRow>,
    pub limit: TailEstimate,
    /// The threshold the pass/fail decision is taken at.
    pub decision_t: f64,
    pub report: GofReport,
}

/// Compares empirical tail ratios on `query.t_grid` with the estimated limit
/// `I(c1, c2)`. The decision uses the largest grid threshold with at least
/// [`DECISION_EXCEEDANCES`] exceedances and passes when the ratio there lies
/// within `max(10% of I, 3 combined standard errors)` of `I`.
pub fn breiman_convergence_check(model: &Mgb2Model, query: &TailQuery, rng: &RngStream) -> Result<TailConvergence> {
    tail_limit_params(model)?;
    let samples = mgb2_sample(model, query.n, &rng.substream(0))?;
    let limit = tail_dependence_limit(model, query.c1, query.c2, query.n, &rng.substream(1))?;
    let rows = query
        .t_grid
        .par_iter()
        .map(|&t| {
            tail_ratio_empirical(&samples, query.c1, query.c2, t).map(|(ratio, exceedances)| TailRow {
                t,
                ratio,
                exceedances,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let decision = rows
        .iter()
        .rev()
        .find(|r| r.exceedances >= DECISION_EXCEEDANCES)
        .copied()
        .ok_or_else(|| {
            let last = rows.last().expect("t_grid is non-empty");
            Error::InsufficientTailData {
                threshold: last.t,
                found: last.exceedances,
                needed: DECISION_EXCEEDANCES,
            }
        })?;
    let stat = (decision.ratio.value - limit.value).abs();
    let combined = (decision.ratio.std_error.powi(2) + limit.std_error.powi(2)).sqrt();
    let threshold = (0.1 * limit.value).max(3.0 * combined);
    Ok(TailConvergence {
        rows,
        limit,
        decision_t: decision.t,
        report: GofReport::new("breiman_convergence", stat, threshold, query.n),
    })
}
