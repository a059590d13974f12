//! Reproducible Monte Carlo.
//!
//! Every trial owns its random stream: trial `i` of `(master_seed, stream_id)`
//! reads a ChaCha8 keystream keyed by the pair and positioned on ChaCha
//! stream `i`. Trials are grouped into fixed-size chunks whose statistics are
//! merged by a fixed pairwise tree, so the summary is bit-identical for any
//! worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Random stream handed to a single trial.
pub type TrialRng = ChaCha8Rng;

const CHUNK: usize = 4096;
const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl StreamSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self { master_seed, stream_id }
    }

    fn key(&self) -> [u8; 32] {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream_id.to_le_bytes());
        key
    }

    /// Random stream of trial `index`; a pure function of `(self, index)`.
    pub fn trial_rng(&self, index: u64) -> TrialRng {
        let mut rng = ChaCha8Rng::from_seed(self.key());
        rng.set_stream(index);
        rng
    }
}

/// Mean, standard error and normal-approximation 95% interval of a batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub n_trials: u64,
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub seed: u64,
    pub stream_id: u64,
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = pairwise_sum(values) / n;
        let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        Moments { n, mean, m2: pairwise_sum(&dev) }
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        let n = a.n + b.n;
        let delta = b.mean - a.mean;
        Moments {
            n,
            mean: a.mean + delta * (b.n / n),
            m2: a.m2 + b.m2 + delta * delta * (a.n * b.n / n),
        }
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn pairwise_merge(parts: &[Moments]) -> Moments {
    match parts.len() {
        1 => parts[0],
        len => {
            let mid = len / 2;
            Moments::merge(pairwise_merge(&parts[..mid]), pairwise_merge(&parts[mid..]))
        }
    }
}

/// Runs `n` independent trials and summarizes their values.
///
/// `trial` must be a pure function of the stream it is handed. Chunks of
/// trials are distributed over `workers` threads; the result does not depend
/// on `workers`.
pub fn run_trials<F>(trial: F, n: u64, spec: StreamSpec, workers: usize) -> Result<TrialSummary>
where
    F: Fn(&mut TrialRng) -> f64 + Sync,
{
    if n == 0 {
        return Err(Error::Domain("run_trials needs at least one trial".into()));
    }
    let n_chunks = n.div_ceil(CHUNK as u64);
    let chunk = |c: u64| -> Moments {
        let start = c * CHUNK as u64;
        let end = (start + CHUNK as u64).min(n);
        let values: Vec<f64> = (start..end)
            .map(|i| trial(&mut spec.trial_rng(i)))
            .collect();
        Moments::of(&values)
    };

    let parts: Vec<Moments> = if workers <= 1 || n_chunks == 1 {
        (0..n_chunks).map(chunk).collect()
    } else {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        pool.install(|| (0..n_chunks).into_par_iter().map(chunk).collect())
    };

    let total = pairwise_merge(&parts);
    let stderr = if n > 1 {
        (total.m2 / (total.n - 1.0)).sqrt() / total.n.sqrt()
    } else {
        0.0
    };
    Ok(TrialSummary {
        n_trials: n,
        mean: total.mean,
        stderr,
        ci95: (total.mean - Z95 * stderr, total.mean + Z95 * stderr),
        seed: spec.master_seed,
        stream_id: spec.stream_id,
    })
}
