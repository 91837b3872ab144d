use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::tolerances::MIN_BATCHES;

/// A Monte Carlo estimate with a batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub effective_samples: f64,
}

impl MCEstimate {
    pub fn exact(value: f64, n_samples: usize, seed: u64) -> Self {
        MCEstimate { value, std_error: 0.0, n_samples, seed, effective_samples: n_samples as f64 }
    }

    /// `|self − other| ≤ k · √(σ₁² + σ₂²)`.
    pub fn agrees_with(&self, other: &MCEstimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * self.std_error.hypot(other.std_error)
    }
}

/// Per-batch accumulator of a weighted estimand.
#[derive(Debug, Clone, Copy, Default)]
pub struct Tally {
    pub count: usize,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Tally {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }
}

/// Sampling plan: `n_samples` split into a fixed number of batches, batch
/// `i` drawing from ChaCha8 stream `i` of `seed`. Batches are reduced in
/// index order, so results do not depend on the worker count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McPlan {
    pub n_samples: usize,
    pub seed: u64,
    pub batches: usize,
}

impl McPlan {
    pub fn new(n_samples: usize, seed: u64) -> Result<Self> {
        if n_samples < MIN_BATCHES {
            return Err(invalid(format!("need at least {MIN_BATCHES} samples, got {n_samples}")));
        }
        Ok(McPlan { n_samples, seed, batches: MIN_BATCHES })
    }

    pub fn batch_size(&self, i: usize) -> usize {
        self.n_samples / self.batches + usize::from(i < self.n_samples % self.batches)
    }

    pub fn rng(&self, i: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(i as u64);
        rng
    }

    /// Runs `f(rng, batch_size)` per batch in parallel; output in batch order.
    pub fn run<T, F>(&self, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
    {
        (0..self.batches)
            .into_par_iter()
            .map(|i| f(&mut self.rng(i), self.batch_size(i)))
            .collect()
    }

    /// Mean over all samples with the batch-means standard error.
    pub fn estimate(&self, tallies: &[Tally]) -> MCEstimate {
        let n: usize = tallies.iter().map(|t| t.count).sum();
        let sum: f64 = tallies.iter().map(|t| t.sum).sum();
        let sum_sq: f64 = tallies.iter().map(|t| t.sum_sq).sum();
        let mean = sum / n as f64;
        let b = tallies.len() as f64;
        let spread: f64 =
            tallies.iter().map(|t| (t.sum / t.count as f64 - mean).powi(2)).sum::<f64>() / (b * (b - 1.0));
        let effective = if sum_sq > 0.0 { sum * sum / sum_sq } else { n as f64 };
        MCEstimate { value: mean, std_error: spread.sqrt(), n_samples: n, seed: self.seed, effective_samples: effective }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn deterministic_across_pools() {
        let plan = McPlan::new(10_000, 7).unwrap();
        let go = || {
            let tallies = plan
                .run(|rng, n| {
                    let mut t = Tally::default();
                    for _ in 0..n {
                        t.push(rng.random::<f64>());
                    }
                    Ok(t)
                })
                .unwrap();
            plan.estimate(&tallies)
        };
        let a = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(go);
        let b = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(go);
        assert_eq!(a, b);
        assert!((a.value - 0.5).abs() < 3.0 * a.std_error + 1e-3);
        assert!(a.std_error > 0.0 && a.std_error < 0.01);
        assert_eq!(a.n_samples, 10_000);
    }

    #[test]
    fn batch_sizes_cover_all_samples() {
        let plan = McPlan::new(1001, 0).unwrap();
        assert_eq!((0..plan.batches).map(|i| plan.batch_size(i)).sum::<usize>(), 1001);
        assert!(McPlan::new(5, 0).is_err());
    }
}
