//! Diagonal-scan driver shared by every engine.
//!
//! A diagonal `k` is the run of pairs `(i, i + k)` for `i = 0..len - k`. Each
//! engine supplies a [`DiagonalKernel`] that computes an accumulator for the
//! first pair directly and slides it one pair along the diagonal in O(1).
//! The driver owns scheduling, the running minima, anytime progress,
//! parallel fan-out and the stored diagonal tails that make extension cheap.

use std::collections::HashSet;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::aamp::{PowerSumKernel, SquaredEuclideanKernel};
use crate::acamp::{DiagStats, ZnormFScoreKernel, ZnormSquaredKernel, ZnormTables, ZnormVariant};
use crate::config::{validate_config, DistanceKind, ProfileConfig, Schedule};
use crate::error::{Error, Result};
use crate::profile::MatrixProfile;
use crate::series::TimeSeries;

const NO_NEIGHBOR: usize = usize::MAX;

/// Expands `$body` once per kernel type so the scan loop is monomorphized.
macro_rules! with_kernel {
    ($method:expr, $ts:expr, $cfg:expr, $tables:expr, $kernel:ident => $body:expr) => {{
        let cfg: &ProfileConfig = $cfg;
        let values = $ts.values();
        match $method {
            Method::Euclidean => {
                let $kernel = &SquaredEuclideanKernel::new(values, cfg.m);
                $body
            }
            Method::PNorm(p) => {
                let $kernel = &PowerSumKernel::new(values, cfg.m, p);
                $body
            }
            Method::Znorm(variant) => {
                let tables: &ZnormTables = $tables.expect("z-normalized state without tables");
                match variant {
                    ZnormVariant::SquaredDistance => {
                        let $kernel = &ZnormSquaredKernel::new(tables, cfg.m, cfg.flat_threshold);
                        $body
                    }
                    ZnormVariant::FScore => {
                        let $kernel = &ZnormFScoreKernel::new(tables, cfg.m, cfg.flat_threshold);
                        $body
                    }
                }
            }
        }
    }};
}

/// Below this many cells a run stays on the calling thread.
const PARALLEL_MIN_CELLS: u64 = 1 << 16;

pub(crate) trait DiagonalKernel: Sync {
    type Acc: Copy + Send + Sync + fmt::Debug + TailSlot;

    /// Accumulator of the pair `(i, i + k)` computed from scratch.
    fn direct(&self, i: usize, k: usize) -> Self::Acc;

    /// Slides the accumulator of `(i - 1, i - 1 + k)` to `(i, i + k)`.
    fn advance(&self, acc: Self::Acc, i: usize, k: usize) -> Self::Acc;

    /// Comparison value; lower means closer. Monotone in the distance.
    fn score(&self, acc: &Self::Acc) -> f64;

    /// Converts a comparison value back to a distance.
    fn finish(&self, score: f64) -> f64;

    /// Distance of the pair `(i, i + k)` evaluated without any running sums.
    fn exact(&self, i: usize, k: usize) -> f64 {
        self.finish(self.score(&self.direct(i, k)))
    }
}

/// Position of a scan along one diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalCursor<A> {
    /// Diagonal offset.
    pub k: usize,
    /// Left subsequence of the last pair visited.
    pub i: usize,
    pub acc: A,
    pub steps_since_refresh: usize,
}

/// Returned by a [`ProgressObserver`] after each finished diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Called after every completed diagonal with `(done, total)`. Returning
/// [`Flow::Stop`] cancels the run; the profile computed so far remains a
/// valid upper bound.
pub trait ProgressObserver: Send {
    fn on_diagonal(&mut self, done: usize, total: usize) -> Flow;
}

impl<F> ProgressObserver for F
where
    F: FnMut(usize, usize) -> Flow + Send,
{
    fn on_diagonal(&mut self, done: usize, total: usize) -> Flow {
        self(done, total)
    }
}

/// Running minima in comparison space.
#[derive(Debug, Clone)]
pub(crate) struct MinBuffer {
    score: Vec<f64>,
    index: Vec<usize>,
}

impl MinBuffer {
    fn new(len: usize) -> Self {
        Self {
            score: vec![f64::INFINITY; len],
            index: vec![NO_NEIGHBOR; len],
        }
    }

    fn grow(&mut self, len: usize) {
        self.score.resize(len, f64::INFINITY);
        self.index.resize(len, NO_NEIGHBOR);
    }

    /// Keeps `(value, neighbor)` at `pos` if it is lower, or equal with a
    /// smaller neighbor index.
    #[inline(always)]
    fn offer(&mut self, pos: usize, neighbor: usize, value: f64) {
        let cur = self.score[pos];
        if value < cur || (value == cur && neighbor < self.index[pos]) {
            self.score[pos] = value;
            self.index[pos] = neighbor;
        }
    }

    fn merge(&mut self, other: &MinBuffer) {
        for pos in 0..self.score.len() {
            self.offer(pos, other.index[pos], other.score[pos]);
        }
    }
}

/// Per-diagonal tails, typed by accumulator.
#[derive(Debug, Clone)]
pub(crate) enum TailStore {
    Scalar(Vec<Option<DiagonalCursor<f64>>>),
    Stats(Vec<Option<DiagonalCursor<DiagStats>>>),
}

pub(crate) trait TailSlot: Sized {
    fn slots(store: &TailStore) -> &[Option<DiagonalCursor<Self>>];
    fn slots_mut(store: &mut TailStore) -> &mut Vec<Option<DiagonalCursor<Self>>>;
}

impl TailSlot for f64 {
    fn slots(store: &TailStore) -> &[Option<DiagonalCursor<f64>>] {
        match store {
            TailStore::Scalar(v) => v,
            TailStore::Stats(_) => unreachable!("scalar kernel paired with stats tails"),
        }
    }

    fn slots_mut(store: &mut TailStore) -> &mut Vec<Option<DiagonalCursor<f64>>> {
        match store {
            TailStore::Scalar(v) => v,
            TailStore::Stats(_) => unreachable!("scalar kernel paired with stats tails"),
        }
    }
}

impl TailSlot for DiagStats {
    fn slots(store: &TailStore) -> &[Option<DiagonalCursor<DiagStats>>] {
        match store {
            TailStore::Stats(v) => v,
            TailStore::Scalar(_) => unreachable!("stats kernel paired with scalar tails"),
        }
    }

    fn slots_mut(store: &mut TailStore) -> &mut Vec<Option<DiagonalCursor<DiagStats>>> {
        match store {
            TailStore::Stats(v) => v,
            TailStore::Scalar(_) => unreachable!("stats kernel paired with scalar tails"),
        }
    }
}

/// Scans diagonal `k` up to the pair `(last_i, last_i + k)`, starting fresh or
/// resuming after `resume`. Returns the tail cursor.
pub(crate) fn scan_diagonal<K: DiagonalKernel>(
    kernel: &K,
    k: usize,
    resume: Option<DiagonalCursor<K::Acc>>,
    last_i: usize,
    refresh_interval: usize,
    buf: &mut MinBuffer,
) -> DiagonalCursor<K::Acc> {
    let mut cur = match resume {
        Some(cur) => cur,
        None => {
            let acc = kernel.direct(0, k);
            let s = kernel.score(&acc);
            buf.offer(0, k, s);
            buf.offer(k, 0, s);
            DiagonalCursor {
                k,
                i: 0,
                acc,
                steps_since_refresh: 0,
            }
        }
    };
    let mut acc = cur.acc;
    let mut steps = cur.steps_since_refresh;
    for i in (cur.i + 1)..=last_i {
        if refresh_interval != 0 && steps + 1 >= refresh_interval {
            acc = kernel.direct(i, k);
            steps = 0;
        } else {
            acc = kernel.advance(acc, i, k);
            steps += 1;
        }
        let s = kernel.score(&acc);
        buf.offer(i, i + k, s);
        buf.offer(i + k, i, s);
    }
    if last_i > cur.i {
        cur.i = last_i;
    }
    cur.acc = acc;
    cur.steps_since_refresh = steps;
    cur
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Method {
    Euclidean,
    PNorm(f64),
    Znorm(ZnormVariant),
}

/// A matrix-profile computation in progress: the series, its configuration,
/// running minima, the diagonals still to scan and the tail of every
/// finished diagonal.
///
/// Profile entries only ever decrease. [`EngineState::profile`] can be taken
/// at any point and is an entrywise upper bound of the exact profile.
#[derive(Debug, Clone)]
pub struct EngineState {
    ts: TimeSeries,
    cfg: ProfileConfig,
    method: Method,
    tables: Option<ZnormTables>,
    best: MinBuffer,
    pending: Vec<usize>,
    completed: Vec<bool>,
    tails: TailStore,
    cells: u64,
}

impl EngineState {
    /// Validates `cfg` and prepares every diagonal for scanning. Z-normalized
    /// profiles use the F-score comparison.
    pub fn new(ts: TimeSeries, cfg: &ProfileConfig) -> Result<Self> {
        Self::with_variant(ts, cfg, ZnormVariant::default())
    }

    /// Like [`EngineState::new`] with an explicit z-normalized comparison
    /// variant (ignored for the other distances).
    pub fn with_variant(
        ts: TimeSeries,
        cfg: &ProfileConfig,
        variant: ZnormVariant,
    ) -> Result<Self> {
        let cfg = validate_config(&ts, cfg)?;
        let method = match cfg.kind {
            DistanceKind::Euclidean => Method::Euclidean,
            DistanceKind::PNorm(p) => Method::PNorm(p),
            DistanceKind::ZNormalized => Method::Znorm(variant),
        };
        let len = ts.profile_len(cfg.m);
        let max_k = ts.len() - cfg.m;
        let tails = match method {
            Method::Znorm(_) => TailStore::Stats(vec![None; max_k + 1]),
            _ => TailStore::Scalar(vec![None; max_k + 1]),
        };
        let tables =
            matches!(method, Method::Znorm(_)).then(|| ZnormTables::new(ts.values(), cfg.m));
        let mut pending: Vec<usize> = (cfg.exclusion..=max_k).collect();
        if let Schedule::RandomPermutation(seed) = cfg.order {
            pending.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        // Scanned from the back.
        pending.reverse();
        Ok(Self {
            ts,
            cfg,
            method,
            tables,
            best: MinBuffer::new(len),
            pending,
            completed: vec![false; max_k + 1],
            tails,
            cells: 0,
        })
    }

    pub fn series(&self) -> &TimeSeries {
        &self.ts
    }

    pub fn config(&self) -> &ProfileConfig {
        &self.cfg
    }

    /// Offsets of every fully scanned diagonal, ascending.
    pub fn completed_diagonals(&self) -> Vec<usize> {
        self.completed
            .iter()
            .enumerate()
            .filter_map(|(k, done)| done.then_some(k))
            .collect()
    }

    pub fn total_diagonals(&self) -> usize {
        (self.ts.len() - self.cfg.m + 1).saturating_sub(self.cfg.exclusion)
    }

    pub fn is_complete(&self) -> bool {
        self.pending.is_empty()
    }

    /// Number of pair cells evaluated so far (first pairs included).
    pub fn cells_evaluated(&self) -> u64 {
        self.cells
    }

    /// Stored tail of diagonal `k` for the Euclidean and p-norm engines.
    pub fn scalar_tail(&self, k: usize) -> Option<DiagonalCursor<f64>> {
        match &self.tails {
            TailStore::Scalar(v) => v.get(k).copied().flatten(),
            TailStore::Stats(_) => None,
        }
    }

    /// Stored tail of diagonal `k` for the z-normalized engine. Sums are
    /// taken over the series shifted by [`EngineState::znorm_offset`].
    pub fn stats_tail(&self, k: usize) -> Option<DiagonalCursor<DiagStats>> {
        match &self.tails {
            TailStore::Stats(v) => v.get(k).copied().flatten(),
            TailStore::Scalar(_) => None,
        }
    }

    /// Constant subtracted from every sample before z-normalized sums are taken.
    pub fn znorm_offset(&self) -> Option<f64> {
        self.tables.as_ref().map(|t| t.offset)
    }

    /// Current profile; entries not reached yet are infinite. Once every
    /// diagonal is done, each entry is also re-evaluated directly for its
    /// chosen neighbor, which costs O(n m).
    pub fn profile(&self) -> MatrixProfile {
        let (distances, nn_index) = with_kernel!(
            self.method,
            &self.ts,
            &self.cfg,
            self.tables.as_ref(),
            kernel => finish_all(kernel, &self.best, self.is_complete())
        );
        MatrixProfile {
            distances,
            nn_index,
            m: self.cfg.m,
            kind: self.cfg.kind,
            complete: self.is_complete(),
        }
    }

    /// Scans the next scheduled diagonal on the calling thread. Returns false
    /// when nothing was left.
    pub fn step(&mut self) -> bool {
        let Some(k) = self.pending.pop() else {
            return false;
        };
        let Self {
            ts,
            cfg,
            method,
            tables,
            best,
            completed,
            tails,
            cells,
            ..
        } = self;
        let len = ts.profile_len(cfg.m);
        *cells += with_kernel!(
            *method,
            ts,
            cfg,
            tables.as_ref(),
            kernel => scan_one(kernel, k, len, cfg.refresh_interval, tails, best)
        );
        completed[k] = true;
        true
    }

    /// Scans every pending diagonal, in parallel when `cfg.threads` allows.
    /// The observer may stop the run early.
    pub fn run(&mut self, mut observer: Option<&mut dyn ProgressObserver>) -> Result<()> {
        let remaining: u64 = self.pending_cells();
        let threads = match self.cfg.threads {
            0 => rayon::current_num_threads(),
            t => t,
        };
        if threads <= 1 || remaining < PARALLEL_MIN_CELLS {
            let total = self.total_diagonals();
            while self.step() {
                if let Some(obs) = observer.as_deref_mut() {
                    let done = total - self.pending.len();
                    if obs.on_diagonal(done, total) == Flow::Stop {
                        break;
                    }
                }
            }
            return Ok(());
        }
        if self.cfg.threads == 0 {
            self.run_parallel(observer);
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::ThreadPool(e.to_string()))?;
            pool.install(|| self.run_parallel(observer));
        }
        Ok(())
    }

    fn pending_cells(&self) -> u64 {
        let len = self.ts.profile_len(self.cfg.m);
        self.pending
            .iter()
            .map(|&k| {
                let from = match &self.tails {
                    TailStore::Scalar(v) => v[k].map(|c| c.i + 1),
                    TailStore::Stats(v) => v[k].map(|c| c.i + 1),
                };
                (len - k - from.unwrap_or(0)) as u64
            })
            .sum()
    }

    fn run_parallel(&mut self, observer: Option<&mut dyn ProgressObserver>) {
        let Self {
            ts,
            cfg,
            method,
            tables,
            best,
            pending,
            completed,
            tails,
            cells,
        } = self;
        let len = ts.profile_len(cfg.m);
        let job = ParallelJob {
            len,
            total: len.saturating_sub(cfg.exclusion),
            refresh_interval: cfg.refresh_interval,
            pending,
            completed,
            tails,
            best,
            cells,
        };
        with_kernel!(*method, ts, cfg, tables.as_ref(), kernel => job.run(kernel, observer));
    }

    /// Appends samples and brings the profile up to date by resuming every
    /// finished diagonal from its tail and scanning the new diagonals.
    pub fn extend(&mut self, samples: &[f64]) -> Result<()> {
        if samples.is_empty() {
            return Ok(());
        }
        let old_max_k = self.ts.len() - self.cfg.m;
        self.ts.extend(samples)?;
        let new_max_k = self.ts.len() - self.cfg.m;
        let len = self.ts.profile_len(self.cfg.m);
        self.best.grow(len);
        self.completed.resize(new_max_k + 1, false);
        match &mut self.tails {
            TailStore::Scalar(v) => v.resize(new_max_k + 1, None),
            TailStore::Stats(v) => v.resize(new_max_k + 1, None),
        }
        if let Some(tables) = &mut self.tables {
            tables.extend(self.ts.values(), self.cfg.m);
        }

        let mut fresh: Vec<usize> = ((old_max_k + 1).max(self.cfg.exclusion)..=new_max_k).collect();
        if let Schedule::RandomPermutation(seed) = self.cfg.order {
            fresh.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ self.ts.len() as u64));
        }
        let resumed: Vec<usize> = self.completed_diagonals();
        for &k in &resumed {
            self.completed[k] = false;
        }
        // pending is consumed from the back: resumed first, then whatever was
        // still pending, then the new diagonals.
        let mut order: Vec<usize> = resumed;
        order.extend(self.pending.iter().rev());
        order.extend(fresh);
        order.reverse();
        self.pending = order;
        self.run(None)
    }
}

/// Converts the running minima to distances. Once every diagonal is done,
/// each entry is also evaluated directly for its chosen pair and the smaller
/// value kept: running sums lose most of their relative precision near zero,
/// and taking the minimum keeps the last snapshot an upper bound.
fn finish_all<K: DiagonalKernel>(
    kernel: &K,
    best: &MinBuffer,
    polish: bool,
) -> (Vec<f64>, Vec<Option<usize>>) {
    let entry = |(i, (&s, &idx)): (usize, (&f64, &usize))| {
        if idx == NO_NEIGHBOR {
            return (f64::INFINITY, None);
        }
        let d = kernel.finish(s);
        if !polish {
            return (d, Some(idx));
        }
        let (lo, hi) = if i < idx { (i, idx) } else { (idx, i) };
        (d.min(kernel.exact(lo, hi - lo)), Some(idx))
    };
    if polish {
        best.score
            .par_iter()
            .zip(&best.index)
            .enumerate()
            .with_min_len(256)
            .map(entry)
            .unzip()
    } else {
        best.score
            .iter()
            .zip(&best.index)
            .enumerate()
            .map(entry)
            .unzip()
    }
}

fn scan_one<K: DiagonalKernel>(
    kernel: &K,
    k: usize,
    len: usize,
    refresh_interval: usize,
    tails: &mut TailStore,
    best: &mut MinBuffer,
) -> u64 {
    let slots = K::Acc::slots_mut(tails);
    let resume = slots[k];
    let from = resume.map_or(0, |c| c.i + 1);
    let tail = scan_diagonal(kernel, k, resume, len - 1 - k, refresh_interval, best);
    slots[k] = Some(tail);
    (len - k - from) as u64
}

struct Partial<A> {
    best: MinBuffer,
    tails: Vec<(usize, DiagonalCursor<A>)>,
    skipped: Vec<usize>,
    cells: u64,
}

impl<A> Partial<A> {
    fn new(len: usize) -> Self {
        Self {
            best: MinBuffer::new(len),
            tails: Vec::new(),
            skipped: Vec::new(),
            cells: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.best.merge(&other.best);
        self.tails.extend(other.tails);
        self.skipped.extend(other.skipped);
        self.cells += other.cells;
        self
    }
}

/// Borrowed engine state for one parallel run.
struct ParallelJob<'a> {
    len: usize,
    total: usize,
    refresh_interval: usize,
    pending: &'a mut Vec<usize>,
    completed: &'a mut [bool],
    tails: &'a mut TailStore,
    best: &'a mut MinBuffer,
    cells: &'a mut u64,
}

impl ParallelJob<'_> {
    /// Workers fold disjoint diagonal subsets into private buffers which are
    /// merged by entrywise minimum, so the result does not depend on how
    /// rayon splits the work.
    fn run<K: DiagonalKernel>(self, kernel: &K, observer: Option<&mut dyn ProgressObserver>) {
        let Self {
            len,
            total,
            refresh_interval,
            pending,
            completed,
            tails,
            best,
            cells,
        } = self;
        let stop = AtomicBool::new(false);
        let progress = Mutex::new((total - pending.len(), observer));
        let work: Vec<usize> = pending.iter().rev().copied().collect();
        let slots = K::Acc::slots(tails);

        let partial = work
            .par_iter()
            .with_max_len(1)
            .fold(
                || Partial::new(len),
                |mut part, &k| {
                    if stop.load(Ordering::Relaxed) {
                        part.skipped.push(k);
                        return part;
                    }
                    let from = slots[k].map_or(0, |c| c.i + 1);
                    let tail = scan_diagonal(
                        kernel,
                        k,
                        slots[k],
                        len - 1 - k,
                        refresh_interval,
                        &mut part.best,
                    );
                    part.cells += (len - k - from) as u64;
                    part.tails.push((k, tail));
                    let mut guard = progress.lock().expect("progress lock poisoned");
                    guard.0 += 1;
                    let done = guard.0;
                    if let Some(obs) = guard.1.as_deref_mut() {
                        if obs.on_diagonal(done, total) == Flow::Stop {
                            stop.store(true, Ordering::Relaxed);
                        }
                    }
                    part
                },
            )
            .reduce(|| Partial::new(len), Partial::merge);

        best.merge(&partial.best);
        *cells += partial.cells;
        let slots = K::Acc::slots_mut(tails);
        for (k, tail) in partial.tails {
            slots[k] = Some(tail);
            completed[k] = true;
        }
        // Unscanned diagonals stay pending in their original schedule order.
        let skipped: HashSet<usize> = partial.skipped.into_iter().collect();
        pending.retain(|k| skipped.contains(k));
    }
}
