#![allow(dead_code)]

use diagmp::synth;
use diagmp::{MatrixProfile, TimeSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded corpus of (series, m): n in [16, 512], m in [2, n/2], alternating
/// uniform and Gaussian samples.
pub fn corpus(count: usize, seed: u64) -> Vec<(TimeSeries, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|c| {
            let n = rng.random_range(16..=512);
            let m = rng.random_range(2..=n / 2);
            let s = rng.random::<u64>();
            let ts = if c % 2 == 0 {
                synth::uniform(n, s)
            } else {
                synth::gaussian(n, s)
            };
            (ts, m)
        })
        .collect()
}

pub fn within(got: f64, want: f64, abs: f64, rel: f64) -> bool {
    (got - want).abs() <= abs.max(rel * want.abs())
}

/// Panics with the first offending entry.
pub fn assert_profiles_close(
    got: &MatrixProfile,
    want: &MatrixProfile,
    abs: f64,
    rel: f64,
    ctx: &str,
) {
    assert_eq!(got.len(), want.len(), "{ctx}: length");
    for (i, (g, w)) in got.distances.iter().zip(&want.distances).enumerate() {
        let ok = (g.is_infinite() && w.is_infinite()) || within(*g, *w, abs, rel);
        assert!(ok, "{ctx}: entry {i}: got {g}, want {w}");
    }
}
