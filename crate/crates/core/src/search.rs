//! Deterministic max-ratio reduction over statically partitioned work.
//!
//! Work items are numbered; each is processed sequentially into its own
//! accumulator, and accumulators merge by (larger ratio, then smaller item
//! number). Within an item the first tuple attaining the max wins. The result
//! is therefore independent of how rayon splits the range.

use rayon::prelude::*;

use crate::error::{LabError, Result};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "GREEDY_LAB_WORKERS";

/// `num/den` under the conventions `0/0 = 1` and `positive/0 = unbounded`.
pub fn ratio(num: f64, den: f64) -> Option<f64> {
    if den == 0.0 {
        if num == 0.0 {
            Some(1.0)
        } else {
            None
        }
    } else {
        Some(num / den)
    }
}

/// Running maximum of a ratio with its first witness, plus the first
/// `positive/0` witness.
#[derive(Debug)]
pub struct MaxRatio<W> {
    item: usize,
    pub best: Option<(f64, usize, W)>,
    pub unbounded: Option<(usize, W)>,
    pub tuples: u64,
}

impl<W> MaxRatio<W> {
    pub fn new(item: usize) -> Self {
        MaxRatio {
            item,
            best: None,
            unbounded: None,
            tuples: 0,
        }
    }

    /// Records one tuple; the witness is built only when it becomes the new best.
    pub fn offer(&mut self, num: f64, den: f64, witness: impl FnOnce() -> W) {
        self.tuples += 1;
        match ratio(num, den) {
            None => {
                if self.unbounded.is_none() {
                    self.unbounded = Some((self.item, witness()));
                }
            }
            Some(r) => self.offer_ratio(r, witness),
        }
    }

    pub fn offer_ratio(&mut self, r: f64, witness: impl FnOnce() -> W) {
        if self.best.as_ref().is_none_or(|b| r > b.0) {
            self.best = Some((r, self.item, witness()));
        }
    }

    pub fn merge(self, other: Self) -> Self {
        let best = match (self.best, other.best) {
            (Some(a), Some(b)) => Some(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                b
            } else {
                a
            }),
            (a, b) => a.or(b),
        };
        let unbounded = match (self.unbounded, other.unbounded) {
            (Some(a), Some(b)) => Some(if b.0 < a.0 { b } else { a }),
            (a, b) => a.or(b),
        };
        MaxRatio {
            item: self.item.min(other.item),
            best,
            unbounded,
            tuples: self.tuples + other.tuples,
        }
    }
}

/// Runs `work(i, acc)` for every item `i < items` and merges deterministically.
pub fn par_max<W, F>(items: usize, work: F) -> Result<MaxRatio<W>>
where
    W: Send,
    F: Fn(usize, &mut MaxRatio<W>) -> Result<()> + Sync,
{
    (0..items)
        .into_par_iter()
        .map(|i| {
            let mut acc = MaxRatio::new(i);
            work(i, &mut acc)?;
            Ok(acc)
        })
        .try_reduce(|| MaxRatio::new(usize::MAX), |a, b| Ok(a.merge(b)))
}

/// Worker count from [`WORKERS_ENV`], if set.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                LabError::Config(format!(
                    "{WORKERS_ENV} must be a positive integer, got {s:?}"
                ))
            }),
    }
}

/// Runs `f` inside a dedicated pool of `workers` threads, or the global pool.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| LabError::Config(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
