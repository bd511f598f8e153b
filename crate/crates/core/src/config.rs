//! Profile configuration and its validation against a series.

use std::fmt;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Distance between two equal-length subsequences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceKind {
    Euclidean,
    /// Minkowski distance `(sum |x - y|^p)^(1/p)` for real `p >= 1`.
    PNorm(f64),
    /// Euclidean distance between the z-normalized subsequences.
    ZNormalized,
}

impl DistanceKind {
    pub fn name(&self) -> &'static str {
        match self {
            DistanceKind::Euclidean => "euclidean",
            DistanceKind::PNorm(_) => "pnorm",
            DistanceKind::ZNormalized => "znorm",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceKind::PNorm(p) => write!(f, "pnorm(p={p})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Order in which diagonals are scanned. The final profile does not depend
/// on it; only the intermediate (anytime) snapshots do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    #[default]
    Ascending,
    RandomPermutation(u64),
}

/// Parameters of a matrix-profile computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileConfig {
    /// Subsequence length.
    pub m: usize,
    pub kind: DistanceKind,
    /// Minimum admissible `|i - j|` between a subsequence and its neighbor.
    pub exclusion: usize,
    pub order: Schedule,
    /// Steps between exact recomputations of a diagonal accumulator; 0 disables.
    pub refresh_interval: usize,
    /// Variance at or below which a window counts as flat for z-normalization.
    pub flat_threshold: f64,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
}

impl ProfileConfig {
    pub fn new(m: usize, kind: DistanceKind) -> Self {
        Self {
            m,
            kind,
            exclusion: 1,
            order: Schedule::Ascending,
            refresh_interval: 0,
            flat_threshold: default_flat_threshold(m),
            threads: 0,
        }
    }

    pub fn with_exclusion(mut self, exclusion: usize) -> Self {
        self.exclusion = exclusion;
        self
    }

    pub fn with_order(mut self, order: Schedule) -> Self {
        self.order = order;
        self
    }

    pub fn with_refresh_interval(mut self, steps: usize) -> Self {
        self.refresh_interval = steps;
        self
    }

    pub fn with_flat_threshold(mut self, eps: f64) -> Self {
        self.flat_threshold = eps;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

/// `1e-12 * m`: an absolute variance floor that scales with the window.
pub fn default_flat_threshold(m: usize) -> f64 {
    1e-12 * m as f64
}

/// Checks `cfg` against `ts` and returns it unchanged when valid.
pub fn validate_config(ts: &TimeSeries, cfg: &ProfileConfig) -> Result<ProfileConfig> {
    let n = ts.len();
    if cfg.m < 1 || cfg.m > n - 1 {
        return Err(Error::BadSubseqLen { m: cfg.m, n });
    }
    if let DistanceKind::PNorm(p) = cfg.kind {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::BadP(p));
        }
    }
    let max_exclusion = n - cfg.m;
    if cfg.exclusion < 1 || cfg.exclusion > max_exclusion {
        return Err(Error::BadExclusion {
            exclusion: cfg.exclusion,
            max: max_exclusion,
        });
    }
    if !(cfg.flat_threshold.is_finite() && cfg.flat_threshold >= 0.0) {
        return Err(Error::BadFlatThreshold(cfg.flat_threshold));
    }
    Ok(*cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(n: usize) -> TimeSeries {
        TimeSeries::new((0..n).map(|i| i as f64).collect()).unwrap()
    }

    #[test]
    fn accepts_small_example() {
        let ts = series(8);
        let cfg = validate_config(&ts, &ProfileConfig::new(3, DistanceKind::Euclidean)).unwrap();
        assert_eq!(ts.profile_len(cfg.m), 6);
    }

    #[test]
    fn rejects_bad_lengths() {
        let ts = series(8);
        for m in [0, 8, 9] {
            assert_eq!(
                validate_config(&ts, &ProfileConfig::new(m, DistanceKind::Euclidean)),
                Err(Error::BadSubseqLen { m, n: 8 })
            );
        }
        assert!(validate_config(&ts, &ProfileConfig::new(7, DistanceKind::Euclidean)).is_ok());
    }

    #[test]
    fn rejects_bad_p() {
        let ts = series(8);
        assert_eq!(
            validate_config(&ts, &ProfileConfig::new(3, DistanceKind::PNorm(0.5))),
            Err(Error::BadP(0.5))
        );
        assert!(
            validate_config(&ts, &ProfileConfig::new(3, DistanceKind::PNorm(f64::NAN))).is_err()
        );
        assert!(validate_config(&ts, &ProfileConfig::new(3, DistanceKind::PNorm(1.0))).is_ok());
    }

    #[test]
    fn rejects_bad_exclusion() {
        let ts = series(8);
        let base = ProfileConfig::new(3, DistanceKind::Euclidean);
        assert_eq!(
            validate_config(&ts, &base.with_exclusion(0)),
            Err(Error::BadExclusion {
                exclusion: 0,
                max: 5
            })
        );
        assert!(validate_config(&ts, &base.with_exclusion(6)).is_err());
        assert!(validate_config(&ts, &base.with_exclusion(5)).is_ok());
    }

    #[test]
    fn rejects_negative_flat_threshold() {
        let ts = series(8);
        let cfg = ProfileConfig::new(3, DistanceKind::ZNormalized).with_flat_threshold(-1.0);
        assert_eq!(
            validate_config(&ts, &cfg),
            Err(Error::BadFlatThreshold(-1.0))
        );
    }

    #[test]
    fn validation_is_idempotent() {
        let ts = series(20);
        let cfg = ProfileConfig::new(4, DistanceKind::PNorm(3.0))
            .with_exclusion(2)
            .with_order(Schedule::RandomPermutation(7));
        let once = validate_config(&ts, &cfg).unwrap();
        let twice = validate_config(&ts, &once).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once, cfg);
    }
}
