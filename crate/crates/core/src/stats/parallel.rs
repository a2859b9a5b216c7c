//! Deterministic parallel Monte Carlo partitioning.
//!
//! Work is split into fixed-size chunks of [`CHUNK_ROWS`] rows and chunk `k`
//! draws from `root.substream(k)`. The partition never depends on the number
//! of worker threads, so results are bitwise identical for any pool size.

use std::ops::Range;

use rayon::prelude::*;

use super::linalg::Matrix;
use super::rng::RngStream;
use crate::error::{param, Result};

pub const CHUNK_ROWS: usize = 4096;

/// Independent streams handed to each chunk. `main` drives the primary
/// construction, `aux` the independent scale factor and `extra` any further
/// independent ingredient (signs, random exponents).
#[derive(Debug, Clone)]
pub struct ChunkRng {
    pub main: RngStream,
    pub aux: RngStream,
    pub extra: RngStream,
}

impl ChunkRng {
    fn for_chunk(root: &RngStream, k: usize) -> Self {
        let base = root.substream(k as u64);
        Self {
            main: base.substream(0),
            aux: base.substream(1),
            extra: base.substream(2),
        }
    }
}

/// Generates an `n x width` matrix, calling `fill` once per row.
pub fn fill_rows<F>(n: usize, width: usize, root: &RngStream, fill: F) -> Result<Matrix>
where
    F: Fn(&mut ChunkRng, &mut [f64]) -> Result<()> + Sync,
{
    if n == 0 {
        return Err(param("sample size n must be >= 1"));
    }
    let mut data = vec![0.0; n * width];
    data.par_chunks_mut(CHUNK_ROWS * width)
        .enumerate()
        .try_for_each(|(k, chunk)| {
            let mut rng = ChunkRng::for_chunk(root, k);
            chunk.chunks_exact_mut(width).try_for_each(|row| fill(&mut rng, row))
        })?;
    Ok(Matrix::from_raw(n, width, data))
}

/// Maps each chunk of `0..n` to a partial result; the output is in chunk order.
pub fn map_chunks<T, F>(n: usize, root: &RngStream, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<usize>, &mut ChunkRng) -> Result<T> + Sync,
{
    if n == 0 {
        return Err(param("sample size n must be >= 1"));
    }
    let chunks = n.div_ceil(CHUNK_ROWS);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChunkRng::for_chunk(root, k);
            f(k * CHUNK_ROWS..((k + 1) * CHUNK_ROWS).min(n), &mut rng)
        })
        .collect()
}

/// Worker count from `RISKSCALE_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("RISKSCALE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
}

/// Runs `f` inside a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("failed to build thread pool")
        .install(f)
}
