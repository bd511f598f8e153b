//! Argument parsing and the `compute` / `bench` commands.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or validation error.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diagmp::{
    brute_profile, DistanceKind, EngineState, Flow, ProfileConfig, Schedule, ZnormVariant,
};
use thiserror::Error;

use crate::bench::{run_bench, BenchEngine, BenchPlan};
use crate::io::{read_series_csv, write_profile_csv, ReadError};

#[derive(Debug, Parser)]
#[command(
    name = "diagmp",
    version,
    about = "Exact matrix profiles for time series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a matrix profile from a CSV series.
    Compute(ComputeArgs),
    /// Time the engines over a sweep of series or subsequence lengths.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceArg {
    Euclidean,
    Pnorm,
    Znorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Asc,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Auto,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    F,
    Sq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepArg {
    N,
    M,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Input CSV, or '-' for standard input.
    #[arg(long)]
    pub input: String,
    /// Subsequence length.
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_enum)]
    pub distance: DistanceArg,
    /// Exponent for --distance pnorm.
    #[arg(long)]
    pub p: Option<f64>,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Minimum offset between a subsequence and its neighbor.
    #[arg(long, default_value_t = 1)]
    pub exclusion: usize,
    #[arg(long, value_enum, default_value = "asc")]
    pub order: OrderArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// 'oracle' forces the brute-force path.
    #[arg(long, value_enum, default_value = "auto")]
    pub engine: EngineArg,
    #[arg(long = "acamp-variant", value_enum, default_value = "f")]
    pub acamp_variant: VariantArg,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Steps between exact accumulator recomputations; 0 never.
    #[arg(long = "refresh-interval", default_value_t = 0)]
    pub refresh_interval: usize,
    /// Variance floor for z-normalization (default 1e-12 * m).
    #[arg(long = "flat-threshold")]
    pub flat_threshold: Option<f64>,
    /// Print percent-complete lines to standard error.
    #[arg(long)]
    pub progress: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub sweep: SweepArg,
    /// Series lengths for the n sweep.
    #[arg(long = "n-list", value_delimiter = ',', default_values_t = [16384usize, 32768, 65536, 131072])]
    pub n_list: Vec<usize>,
    /// Subsequence lengths for the m sweep.
    #[arg(long = "m-list", value_delimiter = ',', default_values_t = [256usize, 512, 1024, 2048, 4096, 8192, 16384])]
    pub m_list: Vec<usize>,
    /// Fixed subsequence length of the n sweep.
    #[arg(long, default_value_t = 256)]
    pub m: usize,
    /// Fixed series length of the m sweep.
    #[arg(long, default_value_t = 65536)]
    pub n: usize,
    /// Comma-separated subset of aamp, aamp_pnorm, acamp_sq, acamp_f, oracle.
    #[arg(long, value_delimiter = ',', default_values_t = [BenchEngine::Aamp, BenchEngine::AcampF])]
    pub engines: Vec<BenchEngine>,
    #[arg(long, default_value_t = 2)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exponent used by aamp_pnorm.
    #[arg(long, default_value_t = 3.0)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Report CSV; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Invalid(#[from] diagmp::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Usage(_) | CliError::Invalid(_) => 2,
        }
    }

    fn io(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code; messages go to standard error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("diagmp: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compute(args) => compute(&args),
        Command::Bench(args) => bench(&args),
    }
}

fn profile_config(args: &ComputeArgs) -> Result<ProfileConfig, CliError> {
    let kind = match (args.distance, args.p) {
        (DistanceArg::Pnorm, Some(p)) => DistanceKind::PNorm(p),
        (DistanceArg::Pnorm, None) => {
            return Err(CliError::Usage("--distance pnorm requires --p".into()))
        }
        (_, Some(_)) => {
            return Err(CliError::Usage(
                "--p is only valid with --distance pnorm".into(),
            ))
        }
        (DistanceArg::Euclidean, None) => DistanceKind::Euclidean,
        (DistanceArg::Znorm, None) => DistanceKind::ZNormalized,
    };
    let order = match args.order {
        OrderArg::Asc => Schedule::Ascending,
        OrderArg::Random => Schedule::RandomPermutation(args.seed),
    };
    let mut cfg = ProfileConfig::new(args.m, kind)
        .with_exclusion(args.exclusion)
        .with_order(order)
        .with_refresh_interval(args.refresh_interval)
        .with_threads(args.threads);
    if let Some(eps) = args.flat_threshold {
        cfg = cfg.with_flat_threshold(eps);
    }
    Ok(cfg)
}

fn compute(args: &ComputeArgs) -> Result<(), CliError> {
    let cfg = profile_config(args)?;
    let ts = if args.input == "-" {
        read_input(io::stdin().lock(), "<stdin>")?
    } else {
        let file =
            File::open(&args.input).map_err(CliError::io(format!("opening {}", args.input)))?;
        read_input(file, &args.input)?
    };

    let profile = match args.engine {
        EngineArg::Oracle => brute_profile(&ts, &cfg)?,
        EngineArg::Auto => {
            let variant = match args.acamp_variant {
                VariantArg::F => ZnormVariant::FScore,
                VariantArg::Sq => ZnormVariant::SquaredDistance,
            };
            let mut state = EngineState::with_variant(ts, &cfg, variant)?;
            if args.progress {
                let mut last = None;
                let mut report = |done: usize, total: usize| {
                    let pct = done * 100 / total.max(1);
                    if last != Some(pct) {
                        last = Some(pct);
                        eprintln!("progress {pct}%");
                    }
                    Flow::Continue
                };
                state.run(Some(&mut report))?;
            } else {
                state.run(None)?;
            }
            state.profile()
        }
    };

    match &args.output {
        Some(path) => {
            let file =
                File::create(path).map_err(CliError::io(format!("creating {}", path.display())))?;
            write_profile_csv(&profile, file)
                .map_err(CliError::io(format!("writing {}", path.display())))
        }
        None => write_profile_csv(&profile, io::stdout().lock())
            .map_err(CliError::io("writing <stdout>")),
    }
}

fn read_input<R: Read>(source: R, name: &str) -> Result<diagmp::TimeSeries, CliError> {
    read_series_csv(source).map_err(|e| match e {
        ReadError::Io(source) => CliError::Io {
            context: format!("reading {name}"),
            source,
        },
        ReadError::Series(e) => CliError::Invalid(e),
        other => CliError::Usage(format!("{name}: {other}")),
    })
}

fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let points: Vec<(usize, usize)> = match args.sweep {
        SweepArg::N => args.n_list.iter().map(|&n| (n, args.m)).collect(),
        SweepArg::M => args.m_list.iter().map(|&m| (args.n, m)).collect(),
    };
    for &(n, m) in &points {
        if n < 2 || m < 1 || m >= n {
            return Err(CliError::Usage(format!("invalid sweep point n={n}, m={m}")));
        }
    }
    if args.engines.is_empty() {
        return Err(CliError::Usage("--engines is empty".into()));
    }
    let plan = BenchPlan {
        points,
        engines: args.engines.clone(),
        repeats: args.repeats,
        seed: args.seed,
        p: args.p,
        threads: args.threads,
    };
    let report = run_bench(&plan, |row| {
        eprintln!(
            "{:<10} n={:<8} m={:<6} {:>10.4}s  {:.3e} cells/s",
            row.engine.name(),
            row.n,
            row.m,
            row.wall_seconds,
            row.cells_per_second
        );
    })?;
    match &args.output {
        Some(path) => {
            let file =
                File::create(path).map_err(CliError::io(format!("creating {}", path.display())))?;
            report
                .write_csv(file)
                .map_err(CliError::io(format!("writing {}", path.display())))
        }
        None => {
            let mut out = io::stdout().lock();
            report
                .write_csv(&mut out)
                .map_err(CliError::io("writing <stdout>"))?;
            out.flush().map_err(CliError::io("writing <stdout>"))
        }
    }
}
