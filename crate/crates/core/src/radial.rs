//! Positive scaling laws used for radial parts, mixers and random exponents.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::distr::Distribution;
use rand::{Rng, RngCore};

use crate::error::{ensure_positive, param, Error, Result};
use crate::stats::{Gamma, InvGamma, Pareto};

/// A user-supplied positive law.
pub trait RadialHook: Send + Sync {
    fn sample(&self, rng: &mut dyn RngCore) -> f64;

    fn name(&self) -> &str {
        "external"
    }
}

impl<F> RadialHook for F
where
    F: Fn(&mut dyn RngCore) -> f64 + Send + Sync,
{
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self(rng)
    }
}

#[derive(Clone)]
pub enum RadialLaw {
    /// `G^power` with `G ~ Gamma(shape, rate)`.
    GammaPower {
        shape: f64,
        rate: f64,
        power: f64,
    },
    /// Square root of a chi-square variable with `df` degrees of freedom.
    ChiSquareSqrt {
        df: f64,
    },
    /// Survival `x^(-index)` on `[1, ∞)`.
    Pareto {
        index: f64,
    },
    /// `1/G` with `G ~ Gamma(shape, 1)`.
    InvGamma {
        shape: f64,
    },
    PointMass {
        value: f64,
    },
    ExternalHook(Arc<dyn RadialHook>),
}

impl fmt::Debug for RadialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RadialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialLaw::GammaPower { shape, rate, power } => write!(f, "gamma_power:{shape},{rate},{power}"),
            RadialLaw::ChiSquareSqrt { df } => write!(f, "chi_square_sqrt:{df}"),
            RadialLaw::Pareto { index } => write!(f, "pareto:{index}"),
            RadialLaw::InvGamma { shape } => write!(f, "inv_gamma:{shape}"),
            RadialLaw::PointMass { value } => write!(f, "point_mass:{value}"),
            RadialLaw::ExternalHook(h) => write!(f, "external:{}", h.name()),
        }
    }
}

impl RadialLaw {
    pub fn gamma_power(shape: f64, rate: f64, power: f64) -> Result<Self> {
        let law = RadialLaw::GammaPower { shape, rate, power };
        law.validate()?;
        Ok(law)
    }

    pub fn chi_square_sqrt(df: f64) -> Result<Self> {
        let law = RadialLaw::ChiSquareSqrt { df };
        law.validate()?;
        Ok(law)
    }

    pub fn pareto(index: f64) -> Result<Self> {
        let law = RadialLaw::Pareto { index };
        law.validate()?;
        Ok(law)
    }

    pub fn inv_gamma(shape: f64) -> Result<Self> {
        let law = RadialLaw::InvGamma { shape };
        law.validate()?;
        Ok(law)
    }

    pub fn point_mass(value: f64) -> Result<Self> {
        let law = RadialLaw::PointMass { value };
        law.validate()?;
        Ok(law)
    }

    pub fn external(hook: impl RadialHook + 'static) -> Self {
        RadialLaw::ExternalHook(Arc::new(hook))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RadialLaw::GammaPower { shape, rate, power } => {
                ensure_positive("gamma_power shape", shape)?;
                ensure_positive("gamma_power rate", rate)?;
                ensure_positive("gamma_power power", power)
            }
            RadialLaw::ChiSquareSqrt { df } => ensure_positive("chi_square_sqrt df", df),
            RadialLaw::Pareto { index } => ensure_positive("pareto index", index),
            RadialLaw::InvGamma { shape } => ensure_positive("inv_gamma shape", shape),
            RadialLaw::PointMass { value } => ensure_positive("point_mass value", value),
            RadialLaw::ExternalHook(_) => Ok(()),
        }
    }

    /// One strictly positive draw. Only an external hook can fail, by
    /// returning a non-positive or non-finite value.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<f64> {
        let v = match *self {
            RadialLaw::GammaPower { shape, rate, power } => {
                let g = Gamma::new(shape, rate)?.sample(rng);
                if power == 1.0 {
                    g
                } else {
                    g.powf(power)
                }
            }
            RadialLaw::ChiSquareSqrt { df } => Gamma::new(0.5 * df, 0.5)?.sample(rng).sqrt(),
            RadialLaw::Pareto { index } => Pareto::new(index)?.sample(rng),
            RadialLaw::InvGamma { shape } => InvGamma::new(shape)?.sample(rng),
            RadialLaw::PointMass { value } => value,
            RadialLaw::ExternalHook(ref hook) => {
                let v = hook.sample(rng);
                if !(v.is_finite() && v > 0.0) {
                    return Err(param(format!(
                        "external radial hook returned {v}; draws must be positive"
                    )));
                }
                v
            }
        };
        Ok(v)
    }

    /// Regular-variation index of the upper tail, for the laws where it is
    /// known in closed form.
    pub fn tail_index(&self) -> Option<f64> {
        match *self {
            RadialLaw::Pareto { index } => Some(index),
            RadialLaw::InvGamma { shape } => Some(shape),
            _ => None,
        }
    }

    /// Whether the law has a finite mean (unknown for external hooks).
    pub fn has_finite_mean(&self) -> Option<bool> {
        match *self {
            RadialLaw::Pareto { index } => Some(index > 1.0),
            RadialLaw::InvGamma { shape } => Some(shape > 1.0),
            RadialLaw::ExternalHook(_) => None,
            _ => Some(true),
        }
    }
}

impl FromStr for RadialLaw {
    type Err = Error;

    /// Parses `kind:args`, e.g. `point_mass:1`, `gamma_power:3,0.5,0.5`,
    /// `chi_square_sqrt:4`, `pareto:2`, `inv_gamma:2`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| param(format!("radial law `{s}` must look like kind:args")))?;
        let nums = args
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| param(format!("radial law `{s}`: `{}` is not a number", a.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        let expect = |k: usize| {
            if nums.len() == k {
                Ok(())
            } else {
                Err(param(format!(
                    "radial law `{kind}` takes {k} argument(s), got {}",
                    nums.len()
                )))
            }
        };
        match kind.trim() {
            "gamma_power" => {
                expect(3)?;
                RadialLaw::gamma_power(nums[0], nums[1], nums[2])
            }
            "chi_square_sqrt" => {
                expect(1)?;
                RadialLaw::chi_square_sqrt(nums[0])
            }
            "pareto" => {
                expect(1)?;
                RadialLaw::pareto(nums[0])
            }
            "inv_gamma" => {
                expect(1)?;
                RadialLaw::inv_gamma(nums[0])
            }
            "point_mass" => {
                expect(1)?;
                RadialLaw::point_mass(nums[0])
            }
            other => Err(param(format!("unknown radial law `{other}`"))),
        }
    }
}
