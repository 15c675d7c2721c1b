//! Deterministic parallel Monte Carlo.
//!
//! Samples are grouped into fixed-size batches; batch `b` draws from
//! `rng.substream(b)` and results are combined in batch order, so the output
//! does not depend on how many threads run the batches.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stats::{Estimate, Welford};

/// Samples per batch.
pub const BATCH_SIZE: usize = 1024;

fn batches(samples: usize) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let count = samples.div_ceil(BATCH_SIZE);
    (0..count).into_par_iter().map(move |b| {
        let len = BATCH_SIZE.min(samples - b * BATCH_SIZE);
        (b as u64, len)
    })
}

/// `dims` running means of a vector statistic.
///
/// `stat` fills its output slice for one sample.
pub fn monte_carlo_multi<S>(
    samples: usize,
    rng: &RngStream,
    dims: usize,
    stat: S,
) -> Result<Vec<Welford>>
where
    S: Fn(&mut RngStream, &mut [f64]) -> Result<()> + Sync,
{
    let per_batch: Vec<Vec<Welford>> = batches(samples)
        .map(|(b, len)| {
            let mut r = rng.substream(b);
            let mut acc = vec![Welford::new(); dims];
            let mut out = vec![0.0; dims];
            for _ in 0..len {
                stat(&mut r, &mut out)?;
                for (a, &x) in acc.iter_mut().zip(&out) {
                    a.push(x);
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![Welford::new(); dims];
    for batch in &per_batch {
        for (t, w) in total.iter_mut().zip(batch) {
            t.merge(w);
        }
    }
    Ok(total)
}

/// Mean and standard error of a scalar statistic.
pub fn monte_carlo<S>(samples: usize, rng: &RngStream, stat: S) -> Result<Estimate>
where
    S: Fn(&mut RngStream) -> Result<f64> + Sync,
{
    let acc = monte_carlo_multi(samples, rng, 1, |r, out| {
        out[0] = stat(r)?;
        Ok(())
    })?;
    Ok(acc[0].estimate())
}

/// All `samples` draws, in order.
pub fn collect_samples<T, S>(samples: usize, rng: &RngStream, draw: S) -> Result<Vec<T>>
where
    T: Send,
    S: Fn(&mut RngStream) -> Result<T> + Sync,
{
    let per_batch: Vec<Vec<T>> = batches(samples)
        .map(|(b, len)| {
            let mut r = rng.substream(b);
            (0..len).map(|_| draw(&mut r)).collect::<Result<Vec<T>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_batch.into_iter().flatten().collect())
}

/// `f(i, rng.substream(i))` for `i < n`, in order.
pub fn map_indexed<T, S>(n: usize, rng: &RngStream, f: S) -> Result<Vec<T>>
where
    T: Send,
    S: Fn(usize, &mut RngStream) -> Result<T> + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| f(i, &mut rng.substream(i as u64)))
        .collect()
}

/// Runs `f` on a dedicated pool of `threads` workers; `None` uses the
/// global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::InvalidParameter(
            "thread count must be positive".into(),
        )),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
