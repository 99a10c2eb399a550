//! Batched Monte Carlo means with deterministic reduction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of batches used for standard errors (fewer only when there are
/// fewer samples than this).
pub const BATCHES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchedMean {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

fn batch_bounds(samples: u64) -> Vec<(u64, u64)> {
    let batches = (BATCHES as u64).min(samples).max(1);
    (0..batches)
        .map(|b| (b * samples / batches, (b + 1) * samples / batches))
        .collect()
}

fn batch_sum<F: Fn(u64) -> f64>(f: &F, lo: u64, hi: u64) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for i in lo..hi {
        // Neumaier summation
        let x = f(i);
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Mean of `f(0), …, f(samples - 1)` with a batch-means standard error.
///
/// Batches are fixed by `samples` alone and reduced in index order, so the
/// result is bit-identical for any thread count.
pub fn batched_mean<F>(samples: u64, f: F) -> Result<BatchedMean>
where
    F: Fn(u64) -> f64 + Sync,
{
    if samples == 0 {
        return Err(Error::Argument("samples must be >= 1".into()));
    }
    let bounds = batch_bounds(samples);

    #[cfg(feature = "parallel")]
    let sums: Vec<f64> = {
        use rayon::prelude::*;
        bounds
            .par_iter()
            .map(|&(lo, hi)| batch_sum(&f, lo, hi))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let sums: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| batch_sum(&f, lo, hi))
        .collect();

    if sums.iter().any(|s| !s.is_finite()) {
        return Err(Error::EstimateUnreliable(
            "non-finite sample value (overflow)".into(),
        ));
    }

    let n = samples as f64;
    let mean = sums.iter().sum::<f64>() / n;
    let b = bounds.len();
    let std_error = if b < 2 {
        0.0
    } else {
        let ss: f64 = bounds
            .iter()
            .zip(&sums)
            .map(|(&(lo, hi), &s)| {
                let nb = (hi - lo) as f64;
                let d = s / nb - mean;
                nb * nb * d * d
            })
            .sum();
        (ss * b as f64 / ((b - 1) as f64 * n * n)).sqrt()
    };
    Ok(BatchedMean {
        mean,
        std_error,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_zero_error() {
        let m = batched_mean(1000, |_| 1.0).unwrap();
        assert_eq!(m.mean, 1.0);
        assert_eq!(m.std_error, 0.0);
    }

    #[test]
    fn batches_cover_every_sample_once() {
        for n in [1u64, 7, 100, 101, 12345] {
            let bounds = batch_bounds(n);
            assert_eq!(bounds.first().unwrap().0, 0);
            assert_eq!(bounds.last().unwrap().1, n);
            assert!(bounds.windows(2).all(|w| w[0].1 == w[1].0));
        }
    }

    #[test]
    fn error_matches_iid_formula() {
        // Alternating ±1 in blocks: batch means spread gives a sane error.
        let m = batched_mean(100_000, |i| if (i * 2654435761) % 7 < 3 { 1.0 } else { -1.0 }).unwrap();
        assert!(m.std_error > 0.0 && m.std_error < 0.02);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(
            batched_mean(10, |_| f64::INFINITY),
            Err(Error::EstimateUnreliable(_))
        ));
    }
}
