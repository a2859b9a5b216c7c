//! Shared statistical machinery: random streams, variate generators, small
//! dense linear algebra and goodness-of-fit tests.

pub mod gof;
pub mod linalg;
pub mod parallel;
pub mod rng;
pub mod special;
pub mod variates;

pub use gof::{correlation, ks_critical_value, ks_one_sample, ks_two_sample, EmpiricalSample, GofReport};
pub use linalg::{mat_block, mat_inverse, mat_mul, Matrix};
pub use parallel::{fill_rows, map_chunks, threads_from_env, with_threads, ChunkRng, CHUNK_ROWS};
pub use rng::RngStream;
pub use variates::{
    bernoulli_pm1, beta_sample, exp_sample, gamma_sample, inv_gamma_sample, normal_sample, pareto_sample,
    y_marginal_sample, Beta, Gamma, InvGamma, MvNormal, Pareto, SignFlip, YMarginal,
};
