//! Matrix profiles under the plain Euclidean and p-norm distances.
//!
//! Both engines scan one diagonal at a time. The first pair of a diagonal is
//! measured directly in O(m); every following pair reuses the previous pair's
//! accumulator, dropping the leading term and adding the trailing one. The
//! accumulator is the squared distance (Euclidean) or the sum of p-th powers
//! (p-norm), so the only root taken is one per profile entry at the end.

use crate::config::{DistanceKind, ProfileConfig};
use crate::error::{Error, Result};
use crate::profile::MatrixProfile;
use crate::scan::{DiagonalKernel, EngineState, ProgressObserver};
use crate::series::TimeSeries;

/// Slides a squared Euclidean distance one position along a diagonal.
///
/// `out_*` are the samples leaving the two windows, `in_*` the samples
/// entering them. Negative results from cancellation are clamped to 0.
#[inline]
pub fn incremental_euclidean_step(
    acc_sq: f64,
    out_i: f64,
    out_j: f64,
    in_i: f64,
    in_j: f64,
) -> f64 {
    let d_out = out_i - out_j;
    let d_in = in_i - in_j;
    (acc_sq - d_out * d_out + d_in * d_in).max(0.0)
}

/// Slides a sum of `|difference|^p` one position along a diagonal.
#[inline]
pub fn incremental_pnorm_step(
    acc_p: f64,
    out_i: f64,
    out_j: f64,
    in_i: f64,
    in_j: f64,
    p: f64,
) -> f64 {
    (acc_p - abs_pow(out_i - out_j, p) + abs_pow(in_i - in_j, p)).max(0.0)
}

#[inline(always)]
fn abs_pow(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d.abs()
    } else if p == 2.0 {
        d * d
    } else {
        d.abs().powf(p)
    }
}

/// Exact Euclidean matrix profile.
pub fn aamp(
    ts: &TimeSeries,
    cfg: &ProfileConfig,
    observer: Option<&mut dyn ProgressObserver>,
) -> Result<MatrixProfile> {
    if cfg.kind != DistanceKind::Euclidean {
        return Err(Error::KindMismatch {
            engine: "aamp",
            kind: cfg.kind.name(),
        });
    }
    run_to_profile(ts, cfg, observer)
}

/// Exact p-norm matrix profile.
pub fn aamp_pnorm(
    ts: &TimeSeries,
    cfg: &ProfileConfig,
    observer: Option<&mut dyn ProgressObserver>,
) -> Result<MatrixProfile> {
    if !matches!(cfg.kind, DistanceKind::PNorm(_)) {
        return Err(Error::KindMismatch {
            engine: "aamp_pnorm",
            kind: cfg.kind.name(),
        });
    }
    run_to_profile(ts, cfg, observer)
}

fn run_to_profile(
    ts: &TimeSeries,
    cfg: &ProfileConfig,
    observer: Option<&mut dyn ProgressObserver>,
) -> Result<MatrixProfile> {
    let mut state = EngineState::new(ts.clone(), cfg)?;
    state.run(observer)?;
    Ok(state.profile())
}

/// Appends `new_samples` to the state's series and updates the profile,
/// computing only the pairs that involve the new subsequences.
pub fn extend_profile(mut state: EngineState, new_samples: &[f64]) -> Result<EngineState> {
    state.extend(new_samples)?;
    Ok(state)
}

/// Accumulates squared differences.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SquaredEuclideanKernel<'a> {
    t: &'a [f64],
    m: usize,
}

impl<'a> SquaredEuclideanKernel<'a> {
    pub(crate) fn new(t: &'a [f64], m: usize) -> Self {
        Self { t, m }
    }
}

impl DiagonalKernel for SquaredEuclideanKernel<'_> {
    type Acc = f64;

    fn direct(&self, i: usize, k: usize) -> f64 {
        let a = &self.t[i..i + self.m];
        let b = &self.t[i + k..i + k + self.m];
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    #[inline(always)]
    fn advance(&self, acc: f64, i: usize, k: usize) -> f64 {
        let t = self.t;
        let tail = i + self.m - 1;
        incremental_euclidean_step(acc, t[i - 1], t[i - 1 + k], t[tail], t[tail + k])
    }

    #[inline(always)]
    fn score(&self, acc: &f64) -> f64 {
        *acc
    }

    fn finish(&self, score: f64) -> f64 {
        score.sqrt()
    }
}

/// Accumulates `|difference|^p`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerSumKernel<'a> {
    t: &'a [f64],
    m: usize,
    p: f64,
}

impl<'a> PowerSumKernel<'a> {
    pub(crate) fn new(t: &'a [f64], m: usize, p: f64) -> Self {
        Self { t, m, p }
    }
}

impl DiagonalKernel for PowerSumKernel<'_> {
    type Acc = f64;

    fn direct(&self, i: usize, k: usize) -> f64 {
        let a = &self.t[i..i + self.m];
        let b = &self.t[i + k..i + k + self.m];
        a.iter().zip(b).map(|(x, y)| abs_pow(x - y, self.p)).sum()
    }

    #[inline(always)]
    fn advance(&self, acc: f64, i: usize, k: usize) -> f64 {
        let t = self.t;
        let tail = i + self.m - 1;
        incremental_pnorm_step(acc, t[i - 1], t[i - 1 + k], t[tail], t[tail + k], self.p)
    }

    #[inline(always)]
    fn score(&self, acc: &f64) -> f64 {
        *acc
    }

    fn finish(&self, score: f64) -> f64 {
        if self.p == 1.0 {
            score
        } else if self.p == 2.0 {
            score.sqrt()
        } else {
            score.powf(self.p.recip())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Schedule;
    use crate::oracle::{brute_profile, dist_euclidean, dist_pnorm};
    use crate::scan::Flow;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn e1() -> TimeSeries {
        TimeSeries::new(vec![0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]).unwrap()
    }

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (i, (g, w)) in got.iter().zip(want).enumerate() {
            assert!((g - w).abs() <= tol, "entry {i}: got {g}, want {w}");
        }
    }

    #[test]
    fn euclidean_step_examples() {
        // D²(0,1) = 3 slides to D²(1,2) = 3 on E1.
        assert_eq!(incremental_euclidean_step(3.0, 0.0, 1.0, 1.0, 0.0), 3.0);
        assert_eq!(incremental_euclidean_step(0.0, 4.0, 4.0, -2.0, -2.0), 0.0);
        // D²(0,2) = 8 slides to D²(1,3) = 4.
        assert_eq!(incremental_euclidean_step(8.0, 0.0, 2.0, 1.0, 1.0), 4.0);
        let ts = e1();
        assert!((dist_euclidean(&ts, 1, 3, 3).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn euclidean_step_clamps_negative() {
        assert_eq!(incremental_euclidean_step(1e-17, 1.0, 0.0, 0.0, 0.0), 0.0);
    }

    #[test]
    fn pnorm_step_examples() {
        assert_eq!(incremental_pnorm_step(3.0, 0.0, 1.0, 1.0, 0.0, 3.0), 3.0);
        let got = incremental_pnorm_step(8.0, 1.0, 1.0, 0.0, 2.0, 3.0);
        assert_eq!(got, 16.0);
        let ts = e1();
        assert!((dist_pnorm(&ts, 2, 4, 3, 3.0).unwrap() - got.cbrt()).abs() < 1e-12);
        for (acc, a, b, c, d) in [(5.0, 0.3, -1.2, 2.5, 0.1), (0.7, 1.0, 1.0, -3.0, 4.0)] {
            assert_eq!(
                incremental_pnorm_step(acc, a, b, c, d, 2.0),
                incremental_euclidean_step(acc, a, b, c, d)
            );
        }
    }

    #[test]
    fn aamp_on_e1() {
        let mp = aamp(&e1(), &ProfileConfig::new(3, DistanceKind::Euclidean), None).unwrap();
        assert_close(&mp.distances, &[0.0, SQRT3, SQRT3, SQRT3, 0.0], 1e-12);
        assert_eq!(
            mp.nn_index,
            vec![Some(4), Some(0), Some(1), Some(0), Some(0)]
        );
        assert!(mp.complete);
    }

    #[test]
    fn aamp_on_step_series() {
        let ts = TimeSeries::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let mp = aamp(&ts, &ProfileConfig::new(2, DistanceKind::Euclidean), None).unwrap();
        assert_eq!(mp.distances, vec![0.0, 0.0, 1.0]);
        assert_eq!(mp.nn_index[0], Some(1));
        assert_eq!(mp.nn_index[1], Some(0));
        assert!(matches!(mp.nn_index[2], Some(0) | Some(1)));

        let mp = aamp_pnorm(&ts, &ProfileConfig::new(2, DistanceKind::PNorm(4.0)), None).unwrap();
        assert_eq!(mp.distances, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn eight_samples_scan_every_offset() {
        let ts = TimeSeries::new(vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0]).unwrap();
        let mut state =
            EngineState::new(ts, &ProfileConfig::new(3, DistanceKind::Euclidean)).unwrap();
        // Offsets 1..=n-m; offset 5 holds the pair (0, 5).
        assert_eq!(state.total_diagonals(), 5);
        let mut seen = Vec::new();
        let mut obs = |done: usize, total: usize| {
            seen.push((done, total));
            Flow::Continue
        };
        state.run(Some(&mut obs)).unwrap();
        assert_eq!(seen, vec![(1, 5), (2, 5), (3, 5), (4, 5), (5, 5)]);
        assert_eq!(state.completed_diagonals(), vec![1, 2, 3, 4, 5]);
        // 5 + 4 + 3 + 2 + 1 = (n - m)(n - m + 1) / 2
        assert_eq!(state.cells_evaluated(), 15);
    }

    #[test]
    fn aamp_pnorm_on_e1() {
        let mp = aamp_pnorm(
            &e1(),
            &ProfileConfig::new(3, DistanceKind::PNorm(3.0)),
            None,
        )
        .unwrap();
        let c = 3f64.cbrt();
        assert_close(&mp.distances, &[0.0, c, c, c, 0.0], 1e-12);
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let cfg = ProfileConfig::new(3, DistanceKind::ZNormalized);
        assert!(matches!(
            aamp(&e1(), &cfg, None),
            Err(Error::KindMismatch { .. })
        ));
        assert!(matches!(
            aamp_pnorm(&e1(), &cfg, None),
            Err(Error::KindMismatch { .. })
        ));
    }

    #[test]
    fn cancellation_leaves_upper_bound() {
        let ts = TimeSeries::new((0..200).map(|i| ((i * 37) % 17) as f64).collect()).unwrap();
        let cfg = ProfileConfig::new(8, DistanceKind::Euclidean).with_threads(1);
        let mut stop_after_three = |done: usize, _total: usize| {
            if done >= 3 {
                Flow::Stop
            } else {
                Flow::Continue
            }
        };
        let partial = aamp(&ts, &cfg, Some(&mut stop_after_three)).unwrap();
        assert!(!partial.complete);
        let exact = brute_profile(&ts, &cfg).unwrap();
        for (p, e) in partial.distances.iter().zip(&exact.distances) {
            assert!(*p >= *e - 1e-9);
        }
    }

    #[test]
    fn extend_e1_by_one_sample() {
        let cfg = ProfileConfig::new(3, DistanceKind::Euclidean);
        let mut state = EngineState::new(e1(), &cfg).unwrap();
        state.run(None).unwrap();
        let state = extend_profile(state, &[1.0]).unwrap();
        let ext = TimeSeries::new(vec![0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0]).unwrap();
        let scratch = aamp(&ext, &cfg, None).unwrap();
        let got = state.profile();
        assert_eq!(got.len(), 6);
        assert_close(&got.distances, &scratch.distances, 1e-12);
    }

    #[test]
    fn extend_with_nothing_is_identity() {
        let cfg = ProfileConfig::new(3, DistanceKind::Euclidean);
        let mut state = EngineState::new(e1(), &cfg).unwrap();
        state.run(None).unwrap();
        let before = state.profile();
        let cells = state.cells_evaluated();
        let state = extend_profile(state, &[]).unwrap();
        assert_eq!(state.profile(), before);
        assert_eq!(state.cells_evaluated(), cells);
    }

    #[test]
    fn extend_step_series() {
        let ts = TimeSeries::new(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let mut state =
            EngineState::new(ts, &ProfileConfig::new(2, DistanceKind::Euclidean)).unwrap();
        state.run(None).unwrap();
        let cells = state.cells_evaluated();
        let state = extend_profile(state, &[0.0]).unwrap();
        assert_eq!(state.profile().distances, vec![0.0, 0.0, 1.0, 1.0]);
        // Only pairs touching the new subsequence 3: (0,3), (1,3), (2,3).
        assert_eq!(state.cells_evaluated() - cells, 3);
    }

    #[test]
    fn extend_rejects_bad_samples() {
        let mut state =
            EngineState::new(e1(), &ProfileConfig::new(3, DistanceKind::Euclidean)).unwrap();
        state.run(None).unwrap();
        assert!(matches!(
            extend_profile(state, &[1.0, f64::NAN]),
            Err(Error::NonFinite { index: 8, .. })
        ));
    }

    #[test]
    fn refresh_recomputes_accumulator() {
        let ts = TimeSeries::new(
            (0..300)
                .map(|i| (i as f64 * 0.37).sin() * 1e3 + i as f64)
                .collect(),
        )
        .unwrap();
        let cfg = ProfileConfig::new(10, DistanceKind::Euclidean)
            .with_refresh_interval(16)
            .with_order(Schedule::RandomPermutation(3));
        let mut state = EngineState::new(ts.clone(), &cfg).unwrap();
        state.run(None).unwrap();
        for k in [1, 7, 150, 290] {
            let tail = state.scalar_tail(k).unwrap();
            let direct = dist_euclidean(&ts, tail.i, tail.i + k, 10).unwrap().powi(2);
            assert!((tail.acc - direct).abs() <= 1e-9 * direct.max(1.0));
            assert!(tail.steps_since_refresh < 16);
        }
    }
}
