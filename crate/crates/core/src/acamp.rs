//! Matrix profile under the z-normalized Euclidean distance.
//!
//! Along a diagonal the engine keeps five running sums for the window pair
//! `(i, i + k)`: the sum and the sum of squares of each window and the sum
//! of their products. Together they give the Pearson correlation of the two
//! windows, and with it the squared z-normalized distance
//! `DZ² = 2m (1 - corr)`, in O(1) per pair.
//!
//! The F-score variant compares
//! `F = (A·B - m·C)·|A·B - m·C| / ((SA - A²/m)(SB - B²/m))`, which equals
//! `-m²·corr·|corr|`. It orders pairs the same way as `DZ²` and needs no
//! square root; `DZ² = 2m + 2·sign(F)·sqrt(|F|)` recovers the distance once
//! per profile entry.
//!
//! Windows whose variance is at or below the flat threshold have no
//! z-normalization: two flat windows are at distance 0, a flat window and a
//! varying one at `sqrt(2m)`.

use crate::config::{DistanceKind, ProfileConfig};
use crate::error::{Error, Result};
use crate::profile::MatrixProfile;
use crate::scan::{DiagonalKernel, EngineState, ProgressObserver};
use crate::series::TimeSeries;

/// The five running sums of a window pair `(i, i + k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagStats {
    /// Sum of the left window.
    pub sum_a: f64,
    /// Sum of the right window.
    pub sum_b: f64,
    /// Sum of squares of the left window.
    pub sumsq_a: f64,
    /// Sum of squares of the right window.
    pub sumsq_b: f64,
    /// Sum of the products of aligned samples.
    pub cross: f64,
    pub k: usize,
    pub i: usize,
}

impl DiagStats {
    /// `m` times the variance of each window: `SA - A²/m`, `SB - B²/m`.
    #[inline(always)]
    fn scaled_variances(&self, m: f64) -> (f64, f64) {
        (
            self.sumsq_a - self.sum_a * self.sum_a / m,
            self.sumsq_b - self.sum_b * self.sum_b / m,
        )
    }
}

/// Which quantity the z-normalized engine minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZnormVariant {
    /// Squared z-normalized distance.
    SquaredDistance,
    /// The sqrt-free F-score.
    #[default]
    FScore,
}

/// Five sums of the windows starting at 0 and `k`, computed directly.
pub fn init_diag_stats(ts: &TimeSeries, k: usize, m: usize) -> Result<DiagStats> {
    diag_stats_at(ts, 0, k, m)
}

/// Five sums of the windows starting at `i` and `i + k`, computed directly.
pub fn diag_stats_at(ts: &TimeSeries, i: usize, k: usize, m: usize) -> Result<DiagStats> {
    let a = ts.window(i, m)?;
    let b = ts.window(i.saturating_add(k), m)?;
    Ok(stats_of(a, b, i, k))
}

fn stats_of(a: &[f64], b: &[f64], i: usize, k: usize) -> DiagStats {
    let mut s = DiagStats {
        sum_a: 0.0,
        sum_b: 0.0,
        sumsq_a: 0.0,
        sumsq_b: 0.0,
        cross: 0.0,
        k,
        i,
    };
    for (x, y) in a.iter().zip(b) {
        s.sum_a += x;
        s.sum_b += y;
        s.sumsq_a += x * x;
        s.sumsq_b += y * y;
        s.cross += x * y;
    }
    s
}

/// Moves the window pair one position right: drops `out_*`, adds `in_*`.
#[inline(always)]
pub fn advance_stats(stats: DiagStats, out_i: f64, out_j: f64, in_i: f64, in_j: f64) -> DiagStats {
    DiagStats {
        sum_a: stats.sum_a - out_i + in_i,
        sum_b: stats.sum_b - out_j + in_j,
        sumsq_a: stats.sumsq_a - out_i * out_i + in_i * in_i,
        sumsq_b: stats.sumsq_b - out_j * out_j + in_j * in_j,
        cross: stats.cross - out_i * out_j + in_i * in_j,
        k: stats.k,
        i: stats.i + 1,
    }
}

/// Squared z-normalized distance from the five sums, clamped to `[0, 4m]`.
#[inline(always)]
pub fn znorm_sq_from_stats(stats: &DiagStats, m: usize, flat_threshold: f64) -> f64 {
    let mf = m as f64;
    let (va, vb) = stats.scaled_variances(mf);
    let floor = flat_threshold * mf;
    match (va <= floor, vb <= floor) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 2.0 * mf,
        (false, false) => {
            let corr = (stats.cross - stats.sum_a * stats.sum_b / mf) / (va * vb).sqrt();
            (2.0 * mf * (1.0 - corr)).clamp(0.0, 4.0 * mf)
        }
    }
}

/// The F-score of a window pair. Fails with [`Error::Degenerate`] when
/// either window is flat.
pub fn f_score(stats: &DiagStats, m: usize, flat_threshold: f64) -> Result<f64> {
    let mf = m as f64;
    let (va, vb) = stats.scaled_variances(mf);
    let floor = flat_threshold * mf;
    if va <= floor || vb <= floor {
        return Err(Error::Degenerate);
    }
    let num = stats.sum_a * stats.sum_b - mf * stats.cross;
    Ok(num * num.abs() / (va * vb))
}

/// Z-normalized distance from an F-score: `sqrt(2m + 2·sign(F)·sqrt|F|)`,
/// with the radicand clamped to `[0, 4m]`.
#[inline]
pub fn f_to_dz(f: f64, m: usize) -> f64 {
    let mf = m as f64;
    let root = if f == 0.0 {
        0.0
    } else {
        f.signum() * f.abs().sqrt()
    };
    (2.0 * mf + 2.0 * root).clamp(0.0, 4.0 * mf).sqrt()
}

/// The F-score a pair would need for `f_to_dz` to give `sqrt(dz_sq)`.
/// Used to place flat-window pairs in F space.
fn dz_sq_to_f(dz_sq: f64, m: f64) -> f64 {
    let half = (dz_sq - 2.0 * m) / 2.0;
    half * half.abs()
}

/// Exact z-normalized matrix profile.
pub fn acamp(
    ts: &TimeSeries,
    cfg: &ProfileConfig,
    variant: ZnormVariant,
    observer: Option<&mut dyn ProgressObserver>,
) -> Result<MatrixProfile> {
    if cfg.kind != DistanceKind::ZNormalized {
        return Err(Error::KindMismatch {
            engine: "acamp",
            kind: cfg.kind.name(),
        });
    }
    let mut state = EngineState::with_variant(ts.clone(), cfg, variant)?;
    state.run(observer)?;
    Ok(state.profile())
}

/// Window sums of the series shifted by a constant offset.
///
/// The left window of every diagonal starts at 0 and the right one at `k`,
/// so the first-pair sums and sums of squares are shared across diagonals;
/// they are computed once here and only the cross product is measured per
/// diagonal. Shifting by the initial median does not change any z-normalized
/// distance and keeps `SA - A²/m` well conditioned for series far from 0.
#[derive(Debug, Clone)]
pub(crate) struct ZnormTables {
    pub(crate) offset: f64,
    centered: Vec<f64>,
    sums: Vec<f64>,
    sumsqs: Vec<f64>,
    /// Compensated running sums behind the last table entries.
    rolling: [Compensated; 2],
}

/// Neumaier-compensated running sum. Large samples leaving the window do
/// not leave their rounding error behind.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.comp += if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        self.sum = t;
    }

    /// Adds `x * y` including the rounding error of the product.
    #[inline]
    fn add_product(&mut self, x: f64, y: f64) {
        let p = x * y;
        self.add(p);
        self.comp += x.mul_add(y, -p);
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Rolling window sums are recomputed from scratch this often.
const TABLE_REFRESH: usize = 256;

impl ZnormTables {
    pub(crate) fn new(values: &[f64], m: usize) -> Self {
        // The median, so a few extreme samples cannot pull the bulk of the
        // series away from zero.
        let mut sorted = values.to_vec();
        let mid = sorted.len() / 2;
        let offset = *sorted.select_nth_unstable_by(mid, f64::total_cmp).1;
        let mut tables = Self {
            offset,
            centered: Vec::with_capacity(values.len()),
            sums: Vec::new(),
            sumsqs: Vec::new(),
            rolling: [Compensated::default(); 2],
        };
        tables.extend(values, m);
        tables
    }

    /// Catches up with `values`, a (possibly) longer version of the series.
    pub(crate) fn extend(&mut self, values: &[f64], m: usize) {
        let offset = self.offset;
        self.centered
            .extend(values[self.centered.len()..].iter().map(|v| v - offset));
        let windows = values.len() + 1 - m;
        let c = &self.centered;
        let [s, q] = &mut self.rolling;
        for w in self.sums.len()..windows {
            if w % TABLE_REFRESH == 0 {
                *s = Compensated::default();
                *q = Compensated::default();
                for &x in &c[w..w + m] {
                    s.add(x);
                    q.add_product(x, x);
                }
            } else {
                let (out, inn) = (c[w - 1], c[w + m - 1]);
                s.add(-out);
                s.add(inn);
                q.add_product(-out, out);
                q.add_product(inn, inn);
            }
            self.sums.push(s.value());
            self.sumsqs.push(q.value());
        }
    }

    #[inline(always)]
    fn direct(&self, i: usize, k: usize, m: usize) -> DiagStats {
        let c = &self.centered;
        let cross = c[i..i + m]
            .iter()
            .zip(&c[i + k..i + k + m])
            .map(|(x, y)| x * y)
            .sum();
        DiagStats {
            sum_a: self.sums[i],
            sum_b: self.sums[i + k],
            sumsq_a: self.sumsqs[i],
            sumsq_b: self.sumsqs[i + k],
            cross,
            k,
            i,
        }
    }

    /// Squared z-normalized distance of `(i, i + k)` by the two-pass
    /// formula, with the same flat-window rule as the running version.
    fn exact_sq(&self, i: usize, k: usize, m: usize, flat_threshold: f64) -> f64 {
        let c = &self.centered;
        let (a, b) = (&c[i..i + m], &c[i + k..i + k + m]);
        let (mean_a, var_a) = mean_var(a);
        let (mean_b, var_b) = mean_var(b);
        let mf = m as f64;
        match (var_a <= flat_threshold, var_b <= flat_threshold) {
            (true, true) => 0.0,
            (true, false) | (false, true) => 2.0 * mf,
            (false, false) => {
                let (sa, sb) = (var_a.sqrt().recip(), var_b.sqrt().recip());
                a.iter()
                    .zip(b)
                    .map(|(x, y)| {
                        let d = (x - mean_a) * sa - (y - mean_b) * sb;
                        d * d
                    })
                    .sum()
            }
        }
    }

    #[inline(always)]
    fn advance(&self, acc: DiagStats, i: usize, k: usize, m: usize) -> DiagStats {
        // Only the cross product slides; the per-window sums come from the
        // tables so a large sample passing through cannot bias them.
        let c = &self.centered;
        let tail = i + m - 1;
        DiagStats {
            sum_a: self.sums[i],
            sum_b: self.sums[i + k],
            sumsq_a: self.sumsqs[i],
            sumsq_b: self.sumsqs[i + k],
            cross: acc.cross - c[i - 1] * c[i - 1 + k] + c[tail] * c[tail + k],
            k,
            i,
        }
    }
}

pub(crate) struct ZnormSquaredKernel<'a> {
    tables: &'a ZnormTables,
    m: usize,
    flat_threshold: f64,
}

fn mean_var(w: &[f64]) -> (f64, f64) {
    let len = w.len() as f64;
    let mean = w.iter().sum::<f64>() / len;
    (
        mean,
        w.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / len,
    )
}

impl<'a> ZnormSquaredKernel<'a> {
    pub(crate) fn new(tables: &'a ZnormTables, m: usize, flat_threshold: f64) -> Self {
        Self {
            tables,
            m,
            flat_threshold,
        }
    }
}

impl DiagonalKernel for ZnormSquaredKernel<'_> {
    type Acc = DiagStats;

    fn direct(&self, i: usize, k: usize) -> DiagStats {
        self.tables.direct(i, k, self.m)
    }

    #[inline(always)]
    fn advance(&self, acc: DiagStats, i: usize, k: usize) -> DiagStats {
        self.tables.advance(acc, i, k, self.m)
    }

    #[inline(always)]
    fn score(&self, acc: &DiagStats) -> f64 {
        znorm_sq_from_stats(acc, self.m, self.flat_threshold)
    }

    fn finish(&self, score: f64) -> f64 {
        score.sqrt()
    }

    fn exact(&self, i: usize, k: usize) -> f64 {
        self.tables
            .exact_sq(i, k, self.m, self.flat_threshold)
            .sqrt()
    }
}

pub(crate) struct ZnormFScoreKernel<'a> {
    tables: &'a ZnormTables,
    m: usize,
    mf: f64,
    flat_threshold: f64,
    floor: f64,
}

impl<'a> ZnormFScoreKernel<'a> {
    pub(crate) fn new(tables: &'a ZnormTables, m: usize, flat_threshold: f64) -> Self {
        let mf = m as f64;
        Self {
            tables,
            m,
            mf,
            flat_threshold,
            floor: flat_threshold * mf,
        }
    }
}

impl DiagonalKernel for ZnormFScoreKernel<'_> {
    type Acc = DiagStats;

    fn direct(&self, i: usize, k: usize) -> DiagStats {
        self.tables.direct(i, k, self.m)
    }

    #[inline(always)]
    fn advance(&self, acc: DiagStats, i: usize, k: usize) -> DiagStats {
        self.tables.advance(acc, i, k, self.m)
    }

    #[inline(always)]
    fn score(&self, s: &DiagStats) -> f64 {
        let mf = self.mf;
        let (va, vb) = s.scaled_variances(mf);
        match (va <= self.floor, vb <= self.floor) {
            (false, false) => {
                let num = s.sum_a * s.sum_b - mf * s.cross;
                num * num.abs() / (va * vb)
            }
            (true, true) => dz_sq_to_f(0.0, mf),
            _ => dz_sq_to_f(2.0 * mf, mf),
        }
    }

    fn finish(&self, score: f64) -> f64 {
        f_to_dz(score, self.m)
    }

    fn exact(&self, i: usize, k: usize) -> f64 {
        self.tables
            .exact_sq(i, k, self.m, self.flat_threshold)
            .sqrt()
    }
}
