//! Seeded synthetic series for benchmarks and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::series::TimeSeries;

/// `n` samples drawn uniformly from `[0, 1)`.
pub fn uniform(n: usize, seed: u64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TimeSeries::new((0..n).map(|_| rng.random::<f64>()).collect()).expect("n must be at least 2")
}

/// `n` standard normal samples.
pub fn gaussian(n: usize, seed: u64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TimeSeries::new(
        (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect(),
    )
    .expect("n must be at least 2")
}

/// Gaussian random walk.
pub fn random_walk(n: usize, seed: u64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = 0.0;
    TimeSeries::new(
        (0..n)
            .map(|_| {
                level += rng.sample::<f64, _>(StandardNormal);
                level
            })
            .collect(),
    )
    .expect("n must be at least 2")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_in_range() {
        assert_eq!(uniform(64, 9), uniform(64, 9));
        assert_ne!(uniform(64, 9), uniform(64, 10));
        assert!(uniform(500, 1)
            .values()
            .iter()
            .all(|v| (0.0..1.0).contains(v)));
        assert_eq!(gaussian(10, 3).len(), 10);
        assert_eq!(random_walk(10, 3).len(), 10);
    }
}
