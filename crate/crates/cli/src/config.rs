//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! command = sample
//! seed = 7
//! n = 100
//! model.kind = lp_dirichlet
//! model.alphas = 1,1
//! model.p = 2
//! model.radial = point_mass:1
//! ```
//!
//! Lists are comma separated, matrices use `;` between rows (`1,0;0,2`).
//! Every model is built (and therefore validated) while parsing.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use riskscale::{
    ClaytonSpec, EllipticalShiftModel, GaussianShiftModel, LpSpec, Matrix, Mgb2Model, RadialLaw, RandomPSpec,
    TailQuery, WeightedSpec,
};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ConfigError {
    /// 1-based line the offending key sits on, when there is one.
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: `{}`: {}", self.key, self.message),
            None => write!(f, "`{}`: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Sample,
    Premium,
    TailDep,
    Verify,
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sample" => Ok(Command::Sample),
            "premium" => Ok(Command::Premium),
            "taildep" => Ok(Command::TailDep),
            "verify" => Ok(Command::Verify),
            other => Err(format!(
                "unknown command `{other}` (expected sample, premium, taildep or verify)"
            )),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Sample => "sample",
            Command::Premium => "premium",
            Command::TailDep => "taildep",
            Command::Verify => "verify",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mgb2Sampler {
    /// `Θ^{1/a_i} W_i` directly.
    Scale,
    /// Draw Θ, then each margin from its conditional density.
    Conditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PremiumMethod {
    Closed,
    MonteCarlo,
}

#[derive(Debug, Clone)]
pub enum Model {
    None,
    LpDirichlet {
        spec: LpSpec,
        radial: RadialLaw,
    },
    WeightedLpDirichlet {
        spec: WeightedSpec,
        radial: RadialLaw,
    },
    RandomPDirichlet {
        spec: RandomPSpec,
        radial: RadialLaw,
    },
    RandomScale {
        alpha: f64,
        p: f64,
        s_law: RadialLaw,
        d: usize,
    },
    BetaGamma {
        alpha: f64,
        p: f64,
    },
    Clayton(ClaytonSpec),
    Mgb2 {
        model: Mgb2Model,
        sampler: Mgb2Sampler,
    },
    Scalar {
        mu: f64,
        sigma2: f64,
        tau2: f64,
        x: f64,
    },
    GaussianShift {
        model: GaussianShiftModel,
        x: Vec<f64>,
        method: PremiumMethod,
    },
    EllipticalShift {
        model: EllipticalShiftModel,
        x: Vec<f64>,
    },
    TailDep {
        model: Mgb2Model,
        query: TailQuery,
    },
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::None => "none",
            Model::LpDirichlet { .. } => "lp_dirichlet",
            Model::WeightedLpDirichlet { .. } => "weighted_lp_dirichlet",
            Model::RandomPDirichlet { .. } => "random_p_dirichlet",
            Model::RandomScale { .. } => "random_scale",
            Model::BetaGamma { .. } => "beta_gamma",
            Model::Clayton(_) => "clayton",
            Model::Mgb2 { .. } | Model::TailDep { .. } => "mgb2",
            Model::Scalar { .. } => "scalar",
            Model::GaussianShift { .. } => "gaussian_shift",
            Model::EllipticalShift { .. } => "elliptical_shift",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    /// Sample count; only meaningful for sampling and Monte Carlo work.
    pub n: Option<usize>,
    pub output: Option<PathBuf>,
    pub audit: bool,
    pub model: Model,
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

/// Key lookup that remembers which keys were consumed, so leftovers can be
/// reported as unknown.
struct Fields {
    entries: BTreeMap<String, Entry>,
}

impl Fields {
    fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        ConfigError {
            line: self.line_of(key),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            e.value.clone()
        })
    }

    fn required(&mut self, key: &str) -> Result<String, ConfigError> {
        self.raw(key).ok_or_else(|| self.err(key, "missing required key"))
    }

    fn parse_with<T>(&mut self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => f(&v).map(Some).map_err(|m| self.err(key, m)),
        }
    }

    fn req_with<T>(&mut self, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        let v = self.required(key)?;
        f(&v).map_err(|m| self.err(key, m))
    }

    fn f64(&mut self, key: &str) -> Result<f64, ConfigError> {
        self.req_with(key, parse_f64)
    }

    fn list(&mut self, key: &str) -> Result<Vec<f64>, ConfigError> {
        self.req_with(key, parse_list)
    }

    fn matrix(&mut self, key: &str) -> Result<Matrix, ConfigError> {
        self.req_with(key, parse_matrix)
    }

    fn law(&mut self, key: &str, default: Option<&str>) -> Result<RadialLaw, ConfigError> {
        let v = match (self.raw(key), default) {
            (Some(v), _) => v,
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(self.err(key, "missing required key")),
        };
        v.parse::<RadialLaw>().map_err(|e| self.err(key, e.to_string()))
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.parse_with(key, |s| {
            let n: usize = s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))?;
            if n == 0 {
                Err("must be >= 1".to_string())
            } else {
                Ok(n)
            }
        })
    }

    fn leftover(&self) -> Option<ConfigError> {
        self.entries
            .iter()
            .filter(|(_, e)| !e.used)
            .min_by_key(|(_, e)| e.line)
            .map(|(k, e)| ConfigError {
                line: Some(e.line),
                key: k.clone(),
                message: "unknown key".into(),
            })
    }
}

pub(crate) fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{}` is not finite", s.trim()))
    }
}

pub(crate) fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Err("empty list".into());
    }
    s.split(',').map(parse_f64).collect()
}

pub(crate) fn parse_matrix(s: &str) -> Result<Matrix, String> {
    let rows = s.split(';').map(parse_list).collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(&rows).map_err(|e| e.to_string())
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

fn split_lines(text: &str) -> Result<BTreeMap<String, Entry>, ConfigError> {
    let mut entries = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
            line: Some(line),
            key: content.to_string(),
            message: "expected `key = value`".into(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError {
                line: Some(line),
                key: key.to_string(),
                message: "malformed key".into(),
            });
        }
        if let Some(prev) = entries.get(key).map(|e: &Entry| e.line) {
            return Err(ConfigError {
                line: Some(line),
                key: key.to_string(),
                message: format!("duplicate key (first set on line {prev})"),
            });
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
                used: false,
            },
        );
    }
    Ok(entries)
}

/// Parses and validates a configuration document. `command` may be supplied
/// by the caller (the command line) instead of, or in agreement with, the
/// `command` key.
pub fn parse_config_for(text: &str, command: Option<Command>) -> Result<RunConfig, ConfigError> {
    let mut f = Fields {
        entries: split_lines(text)?,
    };
    let from_file = f.parse_with("command", |s| s.parse::<Command>())?;
    let command = match (command, from_file) {
        (Some(a), Some(b)) if a != b => {
            return Err(f.err("command", format!("config says `{b}` but `{a}` was requested")));
        }
        (Some(c), _) | (None, Some(c)) => c,
        (None, None) => return Err(f.err("command", "missing required key")),
    };
    let seed = f
        .parse_with("seed", |s| s.parse::<u64>().map_err(|_| format!("`{s}` is not a u64")))?
        .unwrap_or(DEFAULT_SEED);
    let output = f.raw("output").map(PathBuf::from);
    let audit = f.parse_with("audit", parse_bool)?.unwrap_or(false);

    let (model, n) = match command {
        Command::Verify => (Model::None, None),
        Command::Sample => {
            let n = f.count("n")?.ok_or_else(|| f.err("n", "missing required key"))?;
            (sample_model(&mut f)?, Some(n))
        }
        Command::Premium => {
            let n = f.count("n")?;
            let model = premium_model(&mut f, n)?;
            (model, n)
        }
        Command::TailDep => {
            let n = f.count("n")?.ok_or_else(|| f.err("n", "missing required key"))?;
            (taildep_model(&mut f, n)?, Some(n))
        }
    };
    if let Some(e) = f.leftover() {
        return Err(e);
    }
    Ok(RunConfig {
        command,
        seed,
        n,
        output,
        audit,
        model,
    })
}

/// Parses a configuration whose `command` key is mandatory.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_for(text, None)
}

fn model_err(f: &Fields, e: riskscale::Error) -> ConfigError {
    f.err("model.kind", e.to_string())
}

fn unknown_kind(f: &Fields, kind: &str, command: &str, allowed: &str) -> ConfigError {
    f.err(
        "model.kind",
        format!("`{kind}` is not available for {command} (expected one of {allowed})"),
    )
}

fn sample_model(f: &mut Fields) -> Result<Model, ConfigError> {
    let kind = f.required("model.kind")?;
    let model = match kind.as_str() {
        "lp_dirichlet" => {
            let (alphas, p) = (f.list("model.alphas")?, f.f64("model.p")?);
            let radial = f.law("model.radial", Some("point_mass:1"))?;
            let spec = LpSpec::new(alphas, p).map_err(|e| model_err(f, e))?;
            Model::LpDirichlet { spec, radial }
        }
        "weighted_lp_dirichlet" => {
            let (alphas, p, qs) = (f.list("model.alphas")?, f.f64("model.p")?, f.list("model.qs")?);
            let radial = f.law("model.radial", Some("point_mass:1"))?;
            let spec = LpSpec::new(alphas, p)
                .and_then(|base| WeightedSpec::new(base, qs))
                .map_err(|e| model_err(f, e))?;
            Model::WeightedLpDirichlet { spec, radial }
        }
        "random_p_dirichlet" => {
            let alphas = f.list("model.alphas")?;
            let p_law = f.law("model.p_law", None)?;
            let radial = f.law("model.radial", Some("point_mass:1"))?;
            let spec = RandomPSpec::new(alphas, p_law).map_err(|e| model_err(f, e))?;
            Model::RandomPDirichlet { spec, radial }
        }
        "random_scale" => {
            let (alpha, p) = (f.f64("model.alpha")?, f.f64("model.p")?);
            let s_law = f.law("model.s_law", None)?;
            let d = f
                .count("model.d")?
                .ok_or_else(|| f.err("model.d", "missing required key"))?;
            // Validate the marginal parameters now rather than at run time.
            LpSpec::new(vec![alpha], p).map_err(|e| model_err(f, e))?;
            Model::RandomScale { alpha, p, s_law, d }
        }
        "beta_gamma" => {
            let (alpha, p) = (f.f64("model.alpha")?, f.f64("model.p")?);
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(f.err("model.alpha", "must lie in (0, 1)"));
            }
            LpSpec::new(vec![alpha], p).map_err(|e| model_err(f, e))?;
            Model::BetaGamma { alpha, p }
        }
        "clayton" => {
            let a = f.f64("model.theta_shape")?;
            let d = f
                .count("model.d")?
                .ok_or_else(|| f.err("model.d", "missing required key"))?;
            Model::Clayton(ClaytonSpec::new(a, d).map_err(|e| model_err(f, e))?)
        }
        "mgb2" => {
            let model = mgb2_model(f)?;
            let sampler = f
                .parse_with("model.sampler", |s| match s {
                    "scale" => Ok(Mgb2Sampler::Scale),
                    "conditional" => Ok(Mgb2Sampler::Conditional),
                    other => Err(format!("`{other}` is not a sampler (expected scale or conditional)")),
                })?
                .unwrap_or(Mgb2Sampler::Scale);
            Model::Mgb2 { model, sampler }
        }
        other => {
            return Err(unknown_kind(
                f,
                other,
                "sample",
                "lp_dirichlet, weighted_lp_dirichlet, random_p_dirichlet, random_scale, beta_gamma, clayton, mgb2",
            ))
        }
    };
    Ok(model)
}

fn mgb2_model(f: &mut Fields) -> Result<Mgb2Model, ConfigError> {
    let (a, b, p) = (f.list("model.a")?, f.list("model.b")?, f.list("model.p")?);
    let theta = f.law("model.theta", None)?;
    Mgb2Model::new(a, b, p, theta).map_err(|e| model_err(f, e))
}

fn premium_model(f: &mut Fields, n: Option<usize>) -> Result<Model, ConfigError> {
    let kind = f.required("model.kind")?;
    let model = match kind.as_str() {
        "scalar" => {
            let (mu, sigma2, tau2, x) = (
                f.f64("model.mu")?,
                f.f64("model.sigma2")?,
                f.f64("model.tau2")?,
                f.f64("model.x")?,
            );
            riskscale::premium_scalar(mu, sigma2, tau2, x).map_err(|e| model_err(f, e))?;
            Model::Scalar { mu, sigma2, tau2, x }
        }
        "gaussian_shift" => {
            let mu = f.list("model.mu")?;
            let sigma = f.matrix("model.sigma")?;
            let sigma0 = f.matrix("model.sigma0")?;
            let x = f.list("model.x")?;
            let method = f
                .parse_with("model.method", |s| match s {
                    "closed" => Ok(PremiumMethod::Closed),
                    "mc" => Ok(PremiumMethod::MonteCarlo),
                    other => Err(format!("`{other}` is not a method (expected closed or mc)")),
                })?
                .unwrap_or(PremiumMethod::Closed);
            let model = GaussianShiftModel::new(mu, sigma, sigma0).map_err(|e| model_err(f, e))?;
            check_x_len(f, &x, model.dim())?;
            if method == PremiumMethod::MonteCarlo && n.is_none() {
                return Err(f.err("n", "missing required key (needed by model.method = mc)"));
            }
            Model::GaussianShift { model, x, method }
        }
        "elliptical_shift" => {
            let c = f.matrix("model.c")?;
            let nu = f.list("model.nu")?;
            let radial = f.law("model.radial", None)?;
            let x = f.list("model.x")?;
            let model = EllipticalShiftModel::new(c, nu, radial).map_err(|e| model_err(f, e))?;
            check_x_len(f, &x, model.dim())?;
            Model::EllipticalShift { model, x }
        }
        other => {
            return Err(unknown_kind(
                f,
                other,
                "premium",
                "scalar, gaussian_shift, elliptical_shift",
            ))
        }
    };
    let mc = matches!(
        model,
        Model::GaussianShift {
            method: PremiumMethod::MonteCarlo,
            ..
        }
    );
    if n.is_some() && !mc {
        return Err(f.err("n", "only used by model.method = mc"));
    }
    Ok(model)
}

fn check_x_len(f: &Fields, x: &[f64], dim: usize) -> Result<(), ConfigError> {
    if x.len() == dim {
        Ok(())
    } else {
        Err(f.err(
            "model.x",
            format!("has {} entries, the model has dimension {dim}", x.len()),
        ))
    }
}

fn taildep_model(f: &mut Fields, n: usize) -> Result<Model, ConfigError> {
    let kind = f.required("model.kind")?;
    if kind != "mgb2" {
        return Err(unknown_kind(f, &kind, "taildep", "mgb2"));
    }
    let model = mgb2_model(f)?;
    let c1 = f.f64("c1")?;
    let c2 = f.f64("c2")?;
    let t_grid = f.list("t_grid")?;
    let query = TailQuery::new(c1, c2, t_grid, n).map_err(|e| f.err("t_grid", e.to_string()))?;
    Ok(Model::TailDep { model, query })
}
