//! Random shift and random scale models for insurance risks.
//!
//! - [`stats`]: reproducible random streams, variate generators, small dense
//!   linear algebra and Kolmogorov-Smirnov tests.
//! - [`dirichlet`]: L_p Dirichlet, weighted and random-exponent Dirichlet
//!   vectors and their random-scale representations.
//! - [`credibility`]: Bayesian premiums in random shift models.
//! - [`tail`]: exponential scale mixtures, the MGB2 model and its joint-tail limit.
//! - [`verify`]: the built-in identity verification suite.

// Index loops read closer to the matrix formulas than iterator chains.
#![allow(clippy::needless_range_loop)]

pub mod credibility;
pub mod dirichlet;
mod error;
pub mod radial;
pub mod stats;
pub mod tail;
pub mod verify;

pub use credibility::{
    build_cstar, premium_elliptical, premium_gaussian, premium_gaussian_precision_form, premium_mc, premium_scalar,
    shift_joint_sample, EllipticalShiftModel, GaussianShiftModel, GenericShiftModel, McPremium,
};
pub use dirichlet::{
    angular_marginal_cdf, angular_sample, beta_gamma_sample, lp_dirichlet_sample, random_p_sample,
    random_scale_sequence_sample, weighted_sample, DirichletSample, LpSpec, RandomPSpec, WeightedSpec,
};
pub use error::{Error, Result};
pub use radial::{RadialHook, RadialLaw};
pub use stats::{EmpiricalSample, GofReport, Matrix, RngStream};
pub use tail::{
    archimedean_survival, breiman_convergence_check, mgb2_conditional_sample, mgb2_sample, scale_mixture_exp_sample,
    tail_dependence_limit, tail_ratio_empirical, ClaytonSpec, Mgb2Model, TailEstimate, TailQuery,
};
pub use verify::{builtin_verify_suite, CheckResult, VerifyReport};
