//! Direct, non-incremental distances and the O(n² m) brute-force profile.
//!
//! Nothing here shares code with the diagonal engines; these functions are
//! the ground truth the engines are tested against.

use crate::config::{validate_config, DistanceKind, ProfileConfig};
use crate::error::{Error, Result};
use crate::profile::MatrixProfile;
use crate::series::TimeSeries;

pub fn dist_euclidean(ts: &TimeSeries, i: usize, j: usize, m: usize) -> Result<f64> {
    let (a, b) = (ts.window(i, m)?, ts.window(j, m)?);
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Minkowski distance with the absolute-value convention, valid for any real `p >= 1`.
pub fn dist_pnorm(ts: &TimeSeries, i: usize, j: usize, m: usize, p: f64) -> Result<f64> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::BadP(p));
    }
    let (a, b) = (ts.window(i, m)?, ts.window(j, m)?);
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum();
    Ok(sum.powf(p.recip()))
}

/// Euclidean distance between the z-normalized windows.
///
/// A window whose population variance is at or below `flat_threshold` has
/// no defined z-normalization. Two flat windows are at distance 0; a flat
/// window against a varying one is at `sqrt(2m)`, the value a correlation
/// of zero gives.
pub fn dist_znorm(
    ts: &TimeSeries,
    i: usize,
    j: usize,
    m: usize,
    flat_threshold: f64,
) -> Result<f64> {
    let (a, b) = (ts.window(i, m)?, ts.window(j, m)?);
    let (mean_a, var_a) = mean_var(a);
    let (mean_b, var_b) = mean_var(b);
    match (var_a <= flat_threshold, var_b <= flat_threshold) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => return Ok((2.0 * m as f64).sqrt()),
        (false, false) => {}
    }
    let (sd_a, sd_b) = (var_a.sqrt(), var_b.sqrt());
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - mean_a) / sd_a - (y - mean_b) / sd_b;
            d * d
        })
        .sum::<f64>()
        .sqrt())
}

/// Two-pass mean and population variance.
fn mean_var(w: &[f64]) -> (f64, f64) {
    let len = w.len() as f64;
    let mean = w.iter().sum::<f64>() / len;
    let var = w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / len;
    (mean, var)
}

/// Distance of the configured kind between subsequences `i` and `j`.
pub fn pair_distance(ts: &TimeSeries, cfg: &ProfileConfig, i: usize, j: usize) -> Result<f64> {
    match cfg.kind {
        DistanceKind::Euclidean => dist_euclidean(ts, i, j, cfg.m),
        DistanceKind::PNorm(p) => dist_pnorm(ts, i, j, cfg.m, p),
        DistanceKind::ZNormalized => dist_znorm(ts, i, j, cfg.m, cfg.flat_threshold),
    }
}

/// Matrix profile by exhaustive pair enumeration. Ties go to the smallest
/// neighbor index.
pub fn brute_profile(ts: &TimeSeries, cfg: &ProfileConfig) -> Result<MatrixProfile> {
    let cfg = validate_config(ts, cfg)?;
    let len = ts.profile_len(cfg.m);
    let mut distances = vec![f64::INFINITY; len];
    let mut nn_index = vec![None; len];
    // Pairs are visited with i ascending then j ascending, so for every entry
    // the candidates arrive in increasing index order and a strict `<` keeps
    // the smallest index among equal distances.
    for i in 0..len {
        for j in (i + cfg.exclusion)..len {
            let d = pair_distance(ts, &cfg, i, j)?;
            if d < distances[i] {
                distances[i] = d;
                nn_index[i] = Some(j);
            }
            if d < distances[j] {
                distances[j] = d;
                nn_index[j] = Some(i);
            }
        }
    }
    Ok(MatrixProfile {
        distances,
        nn_index,
        m: cfg.m,
        kind: cfg.kind,
        complete: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn e1() -> TimeSeries {
        TimeSeries::new(vec![0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn euclidean_examples() {
        let ts = e1();
        assert_eq!(dist_euclidean(&ts, 0, 4, 3).unwrap(), 0.0);
        assert!(close(dist_euclidean(&ts, 0, 1, 3).unwrap(), SQRT3, 1e-12));
        assert!(close(
            dist_euclidean(&ts, 0, 2, 3).unwrap(),
            8f64.sqrt(),
            1e-12
        ));
        assert!(matches!(
            dist_euclidean(&ts, 5, 0, 3),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn pnorm_examples() {
        let ts = e1();
        assert!(close(dist_pnorm(&ts, 0, 1, 3, 2.0).unwrap(), SQRT3, 1e-12));
        assert!(close(
            dist_pnorm(&ts, 0, 1, 3, 3.0).unwrap(),
            3f64.cbrt(),
            1e-12
        ));
        assert!(close(dist_pnorm(&ts, 1, 3, 3, 3.0).unwrap(), 2.0, 1e-12));
        assert_eq!(dist_pnorm(&ts, 0, 1, 3, 0.9), Err(Error::BadP(0.9)));
    }

    #[test]
    fn znorm_examples() {
        let ts = e1();
        let eps = 3e-12;
        assert!(close(dist_znorm(&ts, 0, 4, 3, eps).unwrap(), 0.0, 1e-12));
        assert!(close(
            dist_znorm(&ts, 0, 2, 3, eps).unwrap(),
            12f64.sqrt(),
            1e-12
        ));
        assert!(close(
            dist_znorm(&ts, 0, 1, 3, eps).unwrap(),
            6f64.sqrt(),
            1e-12
        ));
    }

    #[test]
    fn znorm_flat_windows() {
        let ts = TimeSeries::new(vec![5.0, 5.0, 5.0, 1.0, 2.0]).unwrap();
        assert_eq!(dist_znorm(&ts, 0, 1, 2, 2e-12).unwrap(), 0.0);
        assert_eq!(dist_znorm(&ts, 0, 3, 2, 2e-12).unwrap(), 2.0);
        assert_eq!(dist_znorm(&ts, 3, 1, 2, 2e-12).unwrap(), 2.0);
    }

    #[test]
    fn brute_profiles_on_e1() {
        let ts = e1();
        let mp = brute_profile(&ts, &ProfileConfig::new(3, DistanceKind::Euclidean)).unwrap();
        let want = [0.0, SQRT3, SQRT3, SQRT3, 0.0];
        for (got, want) in mp.distances.iter().zip(want) {
            assert!(close(*got, want, 1e-12));
        }
        assert_eq!(
            mp.nn_index,
            vec![Some(4), Some(0), Some(1), Some(0), Some(0)]
        );

        let mp = brute_profile(&ts, &ProfileConfig::new(3, DistanceKind::ZNormalized)).unwrap();
        let s6 = 6f64.sqrt();
        for (got, want) in mp.distances.iter().zip([0.0, s6, s6, s6, 0.0]) {
            assert!(close(*got, want, 1e-12));
        }

        let mp = brute_profile(&ts, &ProfileConfig::new(3, DistanceKind::PNorm(3.0))).unwrap();
        let c3 = 3f64.cbrt();
        for (got, want) in mp.distances.iter().zip([0.0, c3, c3, c3, 0.0]) {
            assert!(close(*got, want, 1e-12));
        }
    }

    #[test]
    fn brute_leaves_unreachable_entries_empty() {
        // n=6, m=2: five subsequences, exclusion 3 leaves the middle one alone.
        let ts = TimeSeries::new(vec![0.0, 1.0, 3.0, 2.0, 5.0, 4.0]).unwrap();
        let cfg = ProfileConfig::new(2, DistanceKind::Euclidean).with_exclusion(3);
        let mp = brute_profile(&ts, &cfg).unwrap();
        assert_eq!(mp.nn_index[2], None);
        assert!(mp.distances[2].is_infinite());
        assert_eq!(mp.nn_index[0], Some(3));
    }
}
