//! L_p Dirichlet vectors and their random-scale representations.
//!
//! An L_p Dirichlet vector is `R·O` where the angular part
//! `O_i = Y_i / (Σ_j Y_j^p)^(1/p)` lies on the unit L_p sphere, the `Y_j` are
//! independent with `Y_j^p ~ Gamma(α_j, 1/p)`, and `R > 0` is independent of
//! `O`. Since `Y_j^p` is itself the Gamma variate `G_j`, the angular part is
//! computed as `O_i = (G_i / Σ_j G_j)^(1/p)`; this never forms `Y^p` from `Y`
//! and stays in range for any `p`.

use rand::distr::Distribution;
use rand::Rng;

use crate::error::{ensure_all_positive, ensure_positive, param, Result};
use crate::radial::RadialLaw;
use crate::stats::special::beta_cdf;
use crate::stats::{fill_rows, map_chunks, Beta, Gamma, Matrix, RngStream, SignFlip, YMarginal};

/// Parameters `(α_1..α_d, p)` of an L_p Dirichlet angular law.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSpec {
    alphas: Vec<f64>,
    p: f64,
    // G_i = Y_i^p ~ Gamma(α_i, 1/p)
    powers: Vec<Gamma>,
}

impl LpSpec {
    pub fn new(alphas: Vec<f64>, p: f64) -> Result<Self> {
        ensure_all_positive("alphas", &alphas)?;
        ensure_positive("p", p)?;
        let powers = alphas.iter().map(|&a| Gamma::new(a, 1.0 / p)).collect::<Result<_>>()?;
        Ok(Self { alphas, p, powers })
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn alpha_sum(&self) -> f64 {
        self.alphas.iter().sum()
    }

    fn angular_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        normalize_powers(&self.powers, self.p, rng, out);
    }
}

/// Draws `G_i` from `powers` into `out` and overwrites with `(G_i/ΣG)^(1/p)`.
fn normalize_powers<R: Rng + ?Sized>(powers: &[Gamma], p: f64, rng: &mut R, out: &mut [f64]) {
    if out.len() == 1 {
        out[0] = 1.0;
        return;
    }
    let mut total = 0.0;
    for (o, g) in out.iter_mut().zip(powers) {
        *o = g.sample(rng);
        total += *o;
    }
    let inv_p = 1.0 / p;
    for o in out.iter_mut() {
        let share = *o / total;
        *o = if p == 1.0 { share } else { share.powf(inv_p) };
    }
}

/// An L_p Dirichlet specification with independent `±1` signs, `P(I_i = 1) = q_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSpec {
    base: LpSpec,
    qs: Vec<f64>,
    signs: Vec<SignFlip>,
}

impl WeightedSpec {
    pub fn new(base: LpSpec, qs: Vec<f64>) -> Result<Self> {
        if qs.len() != base.dim() {
            return Err(crate::Error::Shape(format!(
                "qs has length {} but the base spec has dimension {}",
                qs.len(),
                base.dim()
            )));
        }
        let signs = qs
            .iter()
            .enumerate()
            .map(|(i, &q)| SignFlip::new(q).map_err(|_| param(format!("qs[{i}] must lie in (0, 1]"))))
            .collect::<Result<_>>()?;
        Ok(Self { base, qs, signs })
    }

    pub fn base(&self) -> &LpSpec {
        &self.base
    }

    pub fn qs(&self) -> &[f64] {
        &self.qs
    }
}

/// L_P Dirichlet with a random exponent `P` drawn per vector; here
/// `Y_i^P ~ Gamma(α_i, 1)`.
#[derive(Debug, Clone)]
pub struct RandomPSpec {
    alphas: Vec<f64>,
    p_law: RadialLaw,
    powers: Vec<Gamma>,
}

impl RandomPSpec {
    pub fn new(alphas: Vec<f64>, p_law: RadialLaw) -> Result<Self> {
        ensure_all_positive("alphas", &alphas)?;
        p_law.validate()?;
        let powers = alphas.iter().map(|&a| Gamma::new(a, 1.0)).collect::<Result<_>>()?;
        Ok(Self { alphas, p_law, powers })
    }

    pub fn dim(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn p_law(&self) -> &RadialLaw {
        &self.p_law
    }
}

/// Rows of `R·I·O` together with their factors.
#[derive(Debug, Clone)]
pub struct DirichletSample {
    /// Unsigned angular parts `O`, one row per draw.
    pub angular: Matrix,
    /// Radial draws `R`.
    pub radii: Vec<f64>,
    /// Final vectors (signed for weighted samples).
    pub values: Matrix,
    exponents: Exponents,
}

#[derive(Debug, Clone)]
enum Exponents {
    Fixed(f64),
    PerRow(Vec<f64>),
}

impl DirichletSample {
    pub fn n(&self) -> usize {
        self.radii.len()
    }

    /// Exponent `p` (or the row's own `P`) of the sphere row `i` lives on.
    pub fn exponent(&self, i: usize) -> f64 {
        match &self.exponents {
            Exponents::Fixed(p) => *p,
            Exponents::PerRow(ps) => ps[i],
        }
    }

    /// `max_i |Σ_j O_ij^p_i − 1|`.
    pub fn sphere_residual(&self) -> f64 {
        self.angular
            .iter_rows()
            .enumerate()
            .map(|(i, row)| {
                let p = self.exponent(i);
                (row.iter().map(|o| o.powf(p)).sum::<f64>() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max_i |Σ_j |X_ij|^p_i / R_i^p_i − 1|`, computed from the final values.
    pub fn radial_residual(&self) -> f64 {
        self.values
            .iter_rows()
            .enumerate()
            .map(|(i, row)| {
                let p = self.exponent(i);
                let r = self.radii[i];
                (row.iter().map(|x| (x.abs() / r).powf(p)).sum::<f64>() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// One angular draw `O` on the unit L_p sphere.
pub fn angular_sample<R: Rng + ?Sized>(spec: &LpSpec, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; spec.dim()];
    spec.angular_into(rng, &mut out);
    out
}

/// `P(O_i <= x) = I_{x^p}(α_i, Σ_{j≠i} α_j)` for the 0-based coordinate `i`.
pub fn angular_marginal_cdf(spec: &LpSpec, i: usize, x: f64) -> Result<f64> {
    let d = spec.dim();
    if i >= d {
        return Err(param(format!("coordinate {i} out of range for dimension {d}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 || d == 1 {
        return Ok(1.0);
    }
    let a = spec.alphas[i];
    let b = spec.alpha_sum() - a;
    Ok(beta_cdf(a, b, x.powf(spec.p)))
}

fn build_sample(raw: Matrix, d: usize, exponents: Exponents) -> DirichletSample {
    // raw rows: [O_1..O_d, R, s_1..s_d]
    let n = raw.rows();
    let mut angular = Vec::with_capacity(n * d);
    let mut values = Vec::with_capacity(n * d);
    let mut radii = Vec::with_capacity(n);
    for row in raw.iter_rows() {
        let r = row[d];
        angular.extend_from_slice(&row[..d]);
        values.extend(row[..d].iter().zip(&row[d + 1..]).map(|(o, s)| r * s * o));
        radii.push(r);
    }
    DirichletSample {
        angular: Matrix::from_raw(n, d, angular),
        radii,
        values: Matrix::from_raw(n, d, values),
        exponents,
    }
}

/// `n` i.i.d. rows of `R·O` with `R ~ radial` independent of `O`.
pub fn lp_dirichlet_sample(spec: &LpSpec, radial: &RadialLaw, n: usize, rng: &RngStream) -> Result<DirichletSample> {
    radial.validate()?;
    let d = spec.dim();
    let raw = fill_rows(n, 2 * d + 1, rng, |chunk, row| {
        spec.angular_into(&mut chunk.main, &mut row[..d]);
        row[d] = radial.sample(&mut chunk.aux)?;
        row[d + 1..].fill(1.0);
        Ok(())
    })?;
    Ok(build_sample(raw, d, Exponents::Fixed(spec.p)))
}

/// `n` i.i.d. rows of `(R I_1 O_1, …, R I_d O_d)` with signs independent of `(R, O)`.
///
/// Angular and radial draws use the same streams as [`lp_dirichlet_sample`],
/// so with every `q_i = 1` the two samplers agree exactly.
pub fn weighted_sample(spec: &WeightedSpec, radial: &RadialLaw, n: usize, rng: &RngStream) -> Result<DirichletSample> {
    radial.validate()?;
    let base = &spec.base;
    let d = base.dim();
    let raw = fill_rows(n, 2 * d + 1, rng, |chunk, row| {
        base.angular_into(&mut chunk.main, &mut row[..d]);
        row[d] = radial.sample(&mut chunk.aux)?;
        for (s, flip) in row[d + 1..].iter_mut().zip(&spec.signs) {
            *s = flip.sample(&mut chunk.extra);
        }
        Ok(())
    })?;
    Ok(build_sample(raw, d, Exponents::Fixed(base.p)))
}

/// `n` i.i.d. rows of `R·O^(P)`: per row `P ~ p_law`, `Y_i^P ~ Gamma(α_i, 1)`,
/// `O_i = Y_i / (Σ Y_j^P)^(1/P)`, and an independent `R ~ radial`.
pub fn random_p_sample(spec: &RandomPSpec, radial: &RadialLaw, n: usize, rng: &RngStream) -> Result<DirichletSample> {
    radial.validate()?;
    let d = spec.dim();
    // raw rows: [O.., R, 1.., P]
    let raw = fill_rows(n, 2 * d + 2, rng, |chunk, row| {
        let p = spec.p_law.sample(&mut chunk.extra)?;
        normalize_powers(&spec.powers, p, &mut chunk.main, &mut row[..d]);
        row[d] = radial.sample(&mut chunk.aux)?;
        row[d + 1..2 * d + 1].fill(1.0);
        row[2 * d + 1] = p;
        Ok(())
    })?;
    let exponents = raw.column(2 * d + 1);
    let trimmed = Matrix::from_raw(
        raw.rows(),
        2 * d + 1,
        raw.iter_rows().flat_map(|r| r[..2 * d + 1].iter().copied()).collect(),
    );
    Ok(build_sample(trimmed, d, Exponents::PerRow(exponents)))
}

/// `n` rows of `S·(Y_1, …, Y_d)` with `Y_i` i.i.d., `Y_i^p ~ Gamma(α, 1/p)`,
/// and `S ~ s_law` independent of the `Y_i`.
pub fn random_scale_sequence_sample(
    alpha: f64,
    p: f64,
    s_law: &RadialLaw,
    d: usize,
    n: usize,
    rng: &RngStream,
) -> Result<Matrix> {
    let y = YMarginal::new(alpha, p)?;
    s_law.validate()?;
    if d == 0 {
        return Err(param("dimension d must be >= 1"));
    }
    fill_rows(n, d, rng, |chunk, row| {
        let s = s_law.sample(&mut chunk.aux)?;
        for x in row.iter_mut() {
            *x = s * y.sample(&mut chunk.main);
        }
        Ok(())
    })
}

/// `n` rows of independent `Y_i` with `Y_i^p ~ Gamma(α_i, 1/p)`, drawn
/// coordinate by coordinate (no normalization involved).
pub fn independent_y_sample(spec: &LpSpec, n: usize, rng: &RngStream) -> Result<Matrix> {
    let ys = spec
        .alphas
        .iter()
        .map(|&a| YMarginal::new(a, spec.p))
        .collect::<Result<Vec<_>>>()?;
    fill_rows(n, spec.dim(), rng, |chunk, row| {
        for (x, y) in row.iter_mut().zip(&ys) {
            *x = y.sample(&mut chunk.main);
        }
        Ok(())
    })
}

/// `n` draws of `(T·E)^(1/p)` with `T ~ Beta(α, 1−α)` independent of
/// `E` exponential with mean `p`. Valid only for `α ∈ (0, 1)`.
pub fn beta_gamma_sample(alpha: f64, p: f64, n: usize, rng: &RngStream) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(param(format!(
            "Beta-Gamma decomposition needs alpha in (0, 1), got {alpha}"
        )));
    }
    ensure_positive("p", p)?;
    let t = Beta::new(alpha, 1.0 - alpha)?;
    let e = Gamma::new(1.0, 1.0 / p)?;
    let inv_p = 1.0 / p;
    let parts = map_chunks(n, rng, |range, chunk| {
        Ok(range
            .map(|_| (t.sample(&mut chunk.main) * e.sample(&mut chunk.aux)).powf(inv_p))
            .collect::<Vec<f64>>())
    })?;
    Ok(parts.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::gof::{correlation, ks_one_sample, ks_two_sample, EmpiricalSample};
    use crate::stats::special::gamma_cdf;
    use proptest::prelude::*;

    fn es(v: Vec<f64>) -> EmpiricalSample {
        EmpiricalSample::new(v).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(LpSpec::new(vec![], 1.0).is_err());
        let err = LpSpec::new(vec![0.0, 1.0], 2.0).unwrap_err();
        assert!(err.to_string().contains("alphas[0] must be > 0"), "{err}");
        assert!(LpSpec::new(vec![1.0], 0.0).is_err());
        let base = LpSpec::new(vec![1.0, 1.0], 2.0).unwrap();
        assert!(WeightedSpec::new(base.clone(), vec![0.5]).is_err());
        assert!(WeightedSpec::new(base, vec![0.5, 0.0]).is_err());
    }

    #[test]
    fn one_dimensional_angular_is_one() {
        let spec = LpSpec::new(vec![2.5], 3.0).unwrap();
        let mut rng = RngStream::new(1, 0);
        for _ in 0..10 {
            assert_eq!(angular_sample(&spec, &mut rng), vec![1.0]);
        }
        let sample = lp_dirichlet_sample(&spec, &RadialLaw::pareto(2.0).unwrap(), 100, &rng).unwrap();
        for i in 0..100 {
            assert_eq!(sample.values.get(i, 0), sample.radii[i]);
        }
    }

    #[test]
    fn simplex_marginal_is_uniform() {
        let spec = LpSpec::new(vec![1.0, 1.0], 1.0).unwrap();
        let mut rng = RngStream::new(2, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| angular_sample(&spec, &mut rng)[0]).collect();
        assert!(ks_one_sample(&es(xs), |x| x.clamp(0.0, 1.0), 0.01).unwrap().pass);
    }

    #[test]
    fn marginal_cdf_values() {
        let spec = LpSpec::new(vec![1.0, 1.0], 1.0).unwrap();
        assert!((angular_marginal_cdf(&spec, 0, 0.3).unwrap() - 0.3).abs() < 1e-14);
        assert_eq!(angular_marginal_cdf(&spec, 1, -1.0).unwrap(), 0.0);
        assert_eq!(angular_marginal_cdf(&spec, 1, 1.0).unwrap(), 1.0);
        assert!(angular_marginal_cdf(&spec, 2, 0.5).is_err());
    }

    #[test]
    fn marginal_cdf_matches_sampler() {
        let spec = LpSpec::new(vec![0.7, 1.3, 2.0], 2.5).unwrap();
        let mut rng = RngStream::new(3, 0);
        let rows: Vec<Vec<f64>> = (0..10_000).map(|_| angular_sample(&spec, &mut rng)).collect();
        for i in 0..3 {
            let xs = rows.iter().map(|r| r[i]).collect();
            let r = ks_one_sample(&es(xs), |x| angular_marginal_cdf(&spec, i, x).unwrap(), 0.01).unwrap();
            assert!(r.pass, "coordinate {i}: {r:?}");
        }
    }

    #[test]
    fn point_mass_radial_stays_on_sphere() {
        let spec = LpSpec::new(vec![1.0, 1.0], 1.0).unwrap();
        let s = lp_dirichlet_sample(&spec, &RadialLaw::point_mass(1.0).unwrap(), 1000, &RngStream::new(4, 0)).unwrap();
        for row in s.values.iter_rows() {
            assert!((row[1] - (1.0 - row[0])).abs() < 1e-15);
        }
        assert!(s.radial_residual() < 1e-12);
    }

    #[test]
    fn gamma_radial_gives_independent_components() {
        // Oracle: direct independent Y draws.
        let spec = LpSpec::new(vec![0.6, 1.4, 2.0], 1.8).unwrap();
        let p = spec.p();
        let radial = RadialLaw::gamma_power(spec.alpha_sum(), 1.0 / p, 1.0 / p).unwrap();
        let n = 10_000;
        let x = lp_dirichlet_sample(&spec, &radial, n, &RngStream::new(5, 0))
            .unwrap()
            .values;
        let mut rng = RngStream::new(5, 1);
        let ys: Vec<YMarginal> = spec.alphas().iter().map(|&a| YMarginal::new(a, p).unwrap()).collect();
        for (i, y) in ys.iter().enumerate() {
            let direct: Vec<f64> = (0..n).map(|_| y.sample(&mut rng)).collect();
            assert!(ks_two_sample(&es(x.column(i)), &es(direct), 0.01).unwrap().pass);
        }
        let pow: Vec<Vec<f64>> = (0..3)
            .map(|i| x.column(i).iter().map(|v| v.powf(p)).collect())
            .collect();
        for i in 0..3 {
            for j in 0..i {
                assert!(correlation(&pow[i], &pow[j]).abs() < 3.0 / (n as f64).sqrt());
            }
        }
    }

    #[test]
    fn unit_signs_reproduce_plain_sampler() {
        let base = LpSpec::new(vec![1.0, 2.0], 2.0).unwrap();
        let radial = RadialLaw::gamma_power(2.0, 1.0, 0.5).unwrap();
        let rng = RngStream::new(6, 0);
        let plain = lp_dirichlet_sample(&base, &radial, 5000, &rng).unwrap();
        let w = weighted_sample(&WeightedSpec::new(base, vec![1.0, 1.0]).unwrap(), &radial, 5000, &rng).unwrap();
        assert_eq!(plain.values, w.values);
    }

    #[test]
    fn weighted_gaussian_case() {
        // Uniform direction on the L_2 sphere needs O_i^2 ~ Dirichlet(1/2, …, 1/2),
        // i.e. α_i = 1/2 with p = 2 (then Y_i = |N(0,1)|).
        let d = 4;
        let base = LpSpec::new(vec![0.5; d], 2.0).unwrap();
        let spec = WeightedSpec::new(base, vec![0.5; d]).unwrap();
        let n = 10_000;
        let s = weighted_sample(
            &spec,
            &RadialLaw::chi_square_sqrt(d as f64).unwrap(),
            n,
            &RngStream::new(7, 0),
        )
        .unwrap();
        for i in 0..d {
            let r = ks_one_sample(&es(s.values.column(i)), crate::stats::special::normal_cdf, 0.01).unwrap();
            assert!(r.pass, "{r:?}");
            for j in 0..i {
                assert!(correlation(&s.values.column(i), &s.values.column(j)).abs() < 3.0 / (n as f64).sqrt());
            }
        }
        assert!(s.radial_residual() < 1e-12);
    }

    #[test]
    fn alpha_two_signed_vector_is_not_gaussian() {
        // With α_i = 2 the squared angular parts are Dirichlet(2, …, 2), not
        // uniform on the sphere; the margins have unit variance but are not normal.
        let d = 4;
        let spec = WeightedSpec::new(LpSpec::new(vec![2.0; d], 2.0).unwrap(), vec![0.5; d]).unwrap();
        let s = weighted_sample(
            &spec,
            &RadialLaw::chi_square_sqrt(d as f64).unwrap(),
            10_000,
            &RngStream::new(7, 1),
        )
        .unwrap();
        let x = s.values.column(0);
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert!((var - 1.0).abs() < 0.05, "{var}");
        assert!(
            !ks_one_sample(&es(x), crate::stats::special::normal_cdf, 0.01)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn random_p_point_mass_matches_fixed_p() {
        let p = 2.5;
        let alphas = vec![0.8, 1.5];
        let radial = RadialLaw::point_mass(1.0).unwrap();
        let fixed = lp_dirichlet_sample(
            &LpSpec::new(alphas.clone(), p).unwrap(),
            &radial,
            10_000,
            &RngStream::new(8, 0),
        )
        .unwrap();
        let random = random_p_sample(
            &RandomPSpec::new(alphas, RadialLaw::point_mass(p).unwrap()).unwrap(),
            &radial,
            10_000,
            &RngStream::new(8, 1),
        )
        .unwrap();
        // Rate-change oracle: G ~ Gamma(α, 1) ⇒ p·G ~ Gamma(α, 1/p), so Y ↦ p^(1/p)·Y maps
        // the rate-1 marginal onto the rate-1/p one, and the common factor cancels in O.
        for i in 0..2 {
            let r = ks_two_sample(&es(fixed.angular.column(i)), &es(random.angular.column(i)), 0.01).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn random_p_rows_live_on_their_own_sphere() {
        let spec = RandomPSpec::new(vec![0.5, 1.0, 2.0], RadialLaw::pareto(2.0).unwrap()).unwrap();
        let s = random_p_sample(
            &spec,
            &RadialLaw::gamma_power(2.0, 1.0, 1.0).unwrap(),
            5000,
            &RngStream::new(9, 0),
        )
        .unwrap();
        assert!(s.sphere_residual() < 1e-12);
        assert!((0..s.n()).any(|i| s.exponent(i) > 2.0));
        let one = RandomPSpec::new(vec![1.5], RadialLaw::pareto(2.0).unwrap()).unwrap();
        let s1 = random_p_sample(&one, &RadialLaw::point_mass(1.0).unwrap(), 100, &RngStream::new(9, 1)).unwrap();
        assert!(s1.angular.as_slice().iter().all(|&o| o == 1.0));
    }

    #[test]
    fn unit_mixer_gives_y_marginals() {
        let (alpha, p) = (1.5, 2.0);
        let x = random_scale_sequence_sample(
            alpha,
            p,
            &RadialLaw::point_mass(1.0).unwrap(),
            2,
            10_000,
            &RngStream::new(10, 0),
        )
        .unwrap();
        let r = ks_one_sample(
            &es(x.column(0).iter().map(|v| v.powf(p)).collect()),
            |g| gamma_cdf(alpha, 1.0 / p, g),
            0.01,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn ratios_cancel_the_scale() {
        let (alpha, p, n) = (1.2, 3.0, 10_000);
        let rng = RngStream::new(11, 0);
        let a = random_scale_sequence_sample(alpha, p, &RadialLaw::point_mass(1.0).unwrap(), 2, n, &rng).unwrap();
        let b = random_scale_sequence_sample(alpha, p, &RadialLaw::pareto(3.0).unwrap(), 2, n, &rng).unwrap();
        // Shared Y streams: the ratios agree up to rounding.
        for (ra, rb) in a.iter_rows().zip(b.iter_rows()) {
            assert!((ra[0] / ra[1] - rb[0] / rb[1]).abs() <= 1e-12 * (ra[0] / ra[1]).abs());
        }
        let c = random_scale_sequence_sample(alpha, p, &RadialLaw::pareto(3.0).unwrap(), 2, n, &RngStream::new(11, 1))
            .unwrap();
        let ratio = |m: &Matrix| m.iter_rows().map(|r| r[0] / r[1]).collect::<Vec<_>>();
        assert!(ks_two_sample(&es(ratio(&a)), &es(ratio(&c)), 0.01).unwrap().pass);
    }

    #[test]
    fn beta_gamma_matches_y_marginal() {
        for (alpha, p, seed) in [(0.5, 2.0, 12), (0.5, 1.0, 13)] {
            let bg = beta_gamma_sample(alpha, p, 10_000, &RngStream::new(seed, 0)).unwrap();
            let y = YMarginal::new(alpha, p).unwrap();
            let mut rng = RngStream::new(seed, 1);
            let direct: Vec<f64> = (0..10_000).map(|_| y.sample(&mut rng)).collect();
            assert!(ks_two_sample(&es(bg), &es(direct), 0.01).unwrap().pass);
        }
        let near_one = beta_gamma_sample(0.999, 1.0, 1000, &RngStream::new(14, 0)).unwrap();
        assert!(near_one.iter().all(|v| v.is_finite() && *v >= 0.0));
        assert!(beta_gamma_sample(1.0, 1.0, 10, &RngStream::new(0, 0)).is_err());
        assert!(beta_gamma_sample(0.0, 1.0, 10, &RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn large_exponent_stays_finite() {
        let spec = LpSpec::new(vec![1.0, 2.0, 3.0], 400.0).unwrap();
        let s = lp_dirichlet_sample(
            &spec,
            &RadialLaw::point_mass(1.0).unwrap(),
            1000,
            &RngStream::new(15, 0),
        )
        .unwrap();
        assert!(s.values.as_slice().iter().all(|v| v.is_finite() && *v > 0.0));
        assert!(s.sphere_residual() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn angular_draws_lie_on_sphere(
            alphas in proptest::collection::vec(0.05f64..8.0, 1..7),
            p in 0.2f64..20.0,
            seed in any::<u64>(),
        ) {
            let spec = LpSpec::new(alphas, p).unwrap();
            let mut rng = RngStream::new(seed, 0);
            for _ in 0..50 {
                let o = angular_sample(&spec, &mut rng);
                let s: f64 = o.iter().map(|v| v.powf(p)).sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn samplers_are_reproducible(seed in any::<u64>(), stream in any::<u64>()) {
            let spec = LpSpec::new(vec![0.5, 1.0, 1.5], 1.5).unwrap();
            let radial = RadialLaw::pareto(2.0).unwrap();
            let a = lp_dirichlet_sample(&spec, &radial, 300, &RngStream::new(seed, stream)).unwrap();
            let b = lp_dirichlet_sample(&spec, &radial, 300, &RngStream::new(seed, stream)).unwrap();
            prop_assert_eq!(a.values, b.values);
        }
    }
}
