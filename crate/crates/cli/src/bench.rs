//! Wall-clock sweeps over series length or subsequence length.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use diagmp::{
    aamp, aamp_pnorm, acamp, brute_profile, synth, DistanceKind, MatrixProfile, ProfileConfig,
    TimeSeries, ZnormVariant,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchEngine {
    Aamp,
    AampPnorm,
    AcampSq,
    AcampF,
    Oracle,
}

impl BenchEngine {
    pub const ALL: [BenchEngine; 5] = [
        BenchEngine::Aamp,
        BenchEngine::AampPnorm,
        BenchEngine::AcampSq,
        BenchEngine::AcampF,
        BenchEngine::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchEngine::Aamp => "aamp",
            BenchEngine::AampPnorm => "aamp_pnorm",
            BenchEngine::AcampSq => "acamp_sq",
            BenchEngine::AcampF => "acamp_f",
            BenchEngine::Oracle => "oracle",
        }
    }
}

impl fmt::Display for BenchEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchEngine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown engine {s:?} (expected one of aamp, aamp_pnorm, acamp_sq, acamp_f, oracle)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub engine: BenchEngine,
    pub n: usize,
    pub m: usize,
    /// Mean over repeats.
    pub wall_seconds: f64,
    pub cells_per_second: f64,
    pub checksum: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn write_csv<W: Write>(&self, sink: W) -> io::Result<()> {
        let mut out = io::BufWriter::new(sink);
        writeln!(out, "engine,n,m,wall_seconds,cells_per_second,checksum")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{:.6e},{:.6e},{:.12e}",
                r.engine, r.n, r.m, r.wall_seconds, r.cells_per_second, r.checksum
            )?;
        }
        out.flush()
    }
}

#[derive(Debug, Clone)]
pub struct BenchPlan {
    /// (n, m) points in sweep order.
    pub points: Vec<(usize, usize)>,
    pub engines: Vec<BenchEngine>,
    pub repeats: usize,
    pub seed: u64,
    /// Exponent for `aamp_pnorm`.
    pub p: f64,
    pub threads: usize,
}

/// Admissible pairs with exclusion 1: `(n - m)(n - m + 1) / 2`.
pub fn pair_cells(n: usize, m: usize) -> u64 {
    let d = (n - m) as u64;
    d * (d + 1) / 2
}

/// Runs one engine once.
pub fn run_engine(
    engine: BenchEngine,
    ts: &TimeSeries,
    m: usize,
    p: f64,
    threads: usize,
) -> diagmp::Result<MatrixProfile> {
    let cfg = |kind| ProfileConfig::new(m, kind).with_threads(threads);
    match engine {
        BenchEngine::Aamp => aamp(ts, &cfg(DistanceKind::Euclidean), None),
        BenchEngine::AampPnorm => aamp_pnorm(ts, &cfg(DistanceKind::PNorm(p)), None),
        BenchEngine::AcampSq => acamp(
            ts,
            &cfg(DistanceKind::ZNormalized),
            ZnormVariant::SquaredDistance,
            None,
        ),
        BenchEngine::AcampF => acamp(
            ts,
            &cfg(DistanceKind::ZNormalized),
            ZnormVariant::FScore,
            None,
        ),
        BenchEngine::Oracle => brute_profile(ts, &cfg(DistanceKind::Euclidean)),
    }
}

/// Times every engine at every point. `on_row` sees each row as it lands.
pub fn run_bench(
    plan: &BenchPlan,
    mut on_row: impl FnMut(&BenchRow),
) -> diagmp::Result<BenchReport> {
    let mut report = BenchReport::default();
    for &(n, m) in &plan.points {
        // Values do not affect timings; one series per length keeps checksums comparable.
        let ts = synth::uniform(n, plan.seed ^ n as u64);
        for &engine in &plan.engines {
            let mut total = 0.0;
            let mut checksum = 0.0;
            let repeats = plan.repeats.max(1);
            for _ in 0..repeats {
                let start = Instant::now();
                let mp = run_engine(engine, &ts, m, plan.p, plan.threads)?;
                total += start.elapsed().as_secs_f64();
                checksum = mp.checksum();
            }
            let wall_seconds = (total / repeats as f64).max(1e-9);
            let row = BenchRow {
                engine,
                n,
                m,
                wall_seconds,
                cells_per_second: pair_cells(n, m) as f64 / wall_seconds,
                checksum,
            };
            on_row(&row);
            report.rows.push(row);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engine_names_round_trip() {
        for e in BenchEngine::ALL {
            assert_eq!(e.name().parse::<BenchEngine>().unwrap(), e);
        }
        assert!("fastest".parse::<BenchEngine>().is_err());
    }

    #[test]
    fn small_sweep_reports_every_point() {
        let plan = BenchPlan {
            points: vec![(128, 8), (256, 8)],
            engines: vec![BenchEngine::Aamp, BenchEngine::Oracle, BenchEngine::AcampF],
            repeats: 2,
            seed: 1,
            p: 3.0,
            threads: 1,
        };
        let mut seen = 0;
        let report = run_bench(&plan, |_| seen += 1).unwrap();
        assert_eq!(report.rows.len(), 6);
        assert_eq!(seen, 6);
        for r in &report.rows {
            assert!(r.wall_seconds > 0.0 && r.checksum.is_finite());
        }
        // Same series and distance: the engine and the oracle agree.
        for pair in report.rows.chunks(3) {
            let (a, o) = (&pair[0], &pair[1]);
            assert!((a.checksum - o.checksum).abs() <= 1e-6 * (a.n - a.m + 1) as f64);
        }
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("engine,n,m,wall_seconds,cells_per_second,checksum\naamp,128,8,"));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn cell_count() {
        assert_eq!(pair_cells(8, 3), 15);
    }
}
