//! Python bindings. The extension module is importable as `diagmp`.
//!
//! Series arguments accept any sequence of floats (lists, tuples, NumPy
//! arrays). Validation failures raise `ValueError`. Long computations release
//! the interpreter lock.

use diagmp::oracle;
use diagmp::{
    DistanceKind, EngineState, Error, MatrixProfile, ProfileConfig, Schedule, TimeSeries,
    ZnormVariant,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn series(values: Vec<f64>) -> PyResult<TimeSeries> {
    TimeSeries::new(values).map_err(to_py)
}

fn distance_kind(distance: &str, p: Option<f64>) -> PyResult<DistanceKind> {
    match (distance, p) {
        ("euclidean", None) => Ok(DistanceKind::Euclidean),
        ("pnorm", Some(p)) => Ok(DistanceKind::PNorm(p)),
        ("pnorm", None) => Err(PyValueError::new_err("distance 'pnorm' requires p")),
        ("znorm", None) => Ok(DistanceKind::ZNormalized),
        ("euclidean" | "znorm", Some(_)) => Err(PyValueError::new_err(
            "p is only valid with distance 'pnorm'",
        )),
        (other, _) => Err(PyValueError::new_err(format!(
            "unknown distance {other:?}; expected 'euclidean', 'pnorm' or 'znorm'"
        ))),
    }
}

fn variant(name: &str) -> PyResult<ZnormVariant> {
    match name {
        "f" => Ok(ZnormVariant::FScore),
        "sq" => Ok(ZnormVariant::SquaredDistance),
        other => Err(PyValueError::new_err(format!(
            "unknown variant {other:?}; expected 'f' or 'sq'"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn config(
    m: usize,
    distance: &str,
    p: Option<f64>,
    exclusion: usize,
    seed: Option<u64>,
    threads: usize,
    refresh_interval: usize,
    flat_threshold: Option<f64>,
) -> PyResult<ProfileConfig> {
    let mut cfg = ProfileConfig::new(m, distance_kind(distance, p)?)
        .with_exclusion(exclusion)
        .with_threads(threads)
        .with_refresh_interval(refresh_interval);
    if let Some(seed) = seed {
        cfg = cfg.with_order(Schedule::RandomPermutation(seed));
    }
    if let Some(eps) = flat_threshold {
        cfg = cfg.with_flat_threshold(eps);
    }
    Ok(cfg)
}

/// A matrix profile: per-subsequence nearest-neighbor distance and index.
#[pyclass(name = "Profile", module = "diagmp", frozen)]
pub struct PyProfile {
    inner: MatrixProfile,
}

#[pymethods]
impl PyProfile {
    #[getter]
    fn distances(&self) -> Vec<f64> {
        self.inner.distances.clone()
    }

    /// Neighbor positions; `None` where no admissible neighbor exists.
    #[getter]
    fn nn_index(&self) -> Vec<Option<usize>> {
        self.inner.nn_index.clone()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn distance(&self) -> &'static str {
        self.inner.kind.name()
    }

    /// False for an anytime snapshot taken before every diagonal was scanned.
    #[getter]
    fn complete(&self) -> bool {
        self.inner.complete
    }

    /// `(position, distance)` of the lowest entry, or None.
    fn motif(&self) -> Option<(usize, f64)> {
        self.inner.motif()
    }

    /// `(position, distance)` of the highest finite entry, or None.
    fn discord(&self) -> Option<(usize, f64)> {
        self.inner.discord()
    }

    fn checksum(&self) -> f64 {
        self.inner.checksum()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Profile(distance={:?}, m={}, len={}, complete={})",
            self.inner.kind.name(),
            self.inner.m,
            self.inner.len(),
            self.inner.complete
        )
    }
}

impl From<MatrixProfile> for PyProfile {
    fn from(inner: MatrixProfile) -> Self {
        Self { inner }
    }
}

/// Exact matrix profile by diagonal scan.
///
/// `seed` switches to a random diagonal order; the result does not depend
/// on it. `variant` picks the z-normalized comparison ('f' or 'sq').
#[pyfunction]
#[pyo3(signature = (series, m, distance = "euclidean", *, p = None, exclusion = 1, seed = None,
    variant = "f", threads = 0, refresh_interval = 0, flat_threshold = None))]
#[allow(clippy::too_many_arguments)]
fn matrix_profile(
    py: Python<'_>,
    series: Vec<f64>,
    m: usize,
    distance: &str,
    p: Option<f64>,
    exclusion: usize,
    seed: Option<u64>,
    variant: &str,
    threads: usize,
    refresh_interval: usize,
    flat_threshold: Option<f64>,
) -> PyResult<PyProfile> {
    let cfg = config(
        m,
        distance,
        p,
        exclusion,
        seed,
        threads,
        refresh_interval,
        flat_threshold,
    )?;
    let variant = self::variant(variant)?;
    let ts = self::series(series)?;
    py.detach(|| {
        let mut state = EngineState::with_variant(ts, &cfg, variant)?;
        state.run(None)?;
        Ok(state.profile())
    })
    .map(PyProfile::from)
    .map_err(to_py)
}

/// Matrix profile by exhaustive O(n² m) enumeration.
#[pyfunction]
#[pyo3(signature = (series, m, distance = "euclidean", *, p = None, exclusion = 1, flat_threshold = None))]
fn brute_profile(
    py: Python<'_>,
    series: Vec<f64>,
    m: usize,
    distance: &str,
    p: Option<f64>,
    exclusion: usize,
    flat_threshold: Option<f64>,
) -> PyResult<PyProfile> {
    let cfg = config(m, distance, p, exclusion, None, 0, 0, flat_threshold)?;
    let ts = self::series(series)?;
    py.detach(|| diagmp::brute_profile(&ts, &cfg))
        .map(PyProfile::from)
        .map_err(to_py)
}

/// Distance between the length-`m` subsequences at `i` and `j`.
#[pyfunction]
#[pyo3(signature = (series, i, j, m, distance = "euclidean", *, p = None, flat_threshold = None))]
fn pair_distance(
    series: Vec<f64>,
    i: usize,
    j: usize,
    m: usize,
    distance: &str,
    p: Option<f64>,
    flat_threshold: Option<f64>,
) -> PyResult<f64> {
    let ts = self::series(series)?;
    let kind = distance_kind(distance, p)?;
    let eps = flat_threshold.unwrap_or_else(|| diagmp::config::default_flat_threshold(m));
    match kind {
        DistanceKind::Euclidean => oracle::dist_euclidean(&ts, i, j, m),
        DistanceKind::PNorm(p) => oracle::dist_pnorm(&ts, i, j, m, p),
        DistanceKind::ZNormalized => oracle::dist_znorm(&ts, i, j, m, eps),
    }
    .map_err(to_py)
}

/// A matrix profile computed one diagonal at a time.
///
/// `profile()` may be called at any point; entries only decrease as more
/// diagonals are scanned. `extend()` appends samples and updates the
/// profile without recomputing finished work.
#[pyclass(name = "IncrementalProfile", module = "diagmp")]
pub struct PyIncremental {
    state: EngineState,
}

#[pymethods]
impl PyIncremental {
    #[new]
    #[pyo3(signature = (series, m, distance = "euclidean", *, p = None, exclusion = 1, seed = None,
        variant = "f", threads = 0, refresh_interval = 0, flat_threshold = None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        series: Vec<f64>,
        m: usize,
        distance: &str,
        p: Option<f64>,
        exclusion: usize,
        seed: Option<u64>,
        variant: &str,
        threads: usize,
        refresh_interval: usize,
        flat_threshold: Option<f64>,
    ) -> PyResult<Self> {
        let cfg = config(
            m,
            distance,
            p,
            exclusion,
            seed,
            threads,
            refresh_interval,
            flat_threshold,
        )?;
        let state = EngineState::with_variant(self::series(series)?, &cfg, self::variant(variant)?)
            .map_err(to_py)?;
        Ok(Self { state })
    }

    /// Scans the next diagonal. Returns False when nothing was left.
    fn step(&mut self) -> bool {
        self.state.step()
    }

    /// Scans every remaining diagonal.
    fn run(&mut self, py: Python<'_>) -> PyResult<()> {
        let state = &mut self.state;
        py.detach(|| state.run(None)).map_err(to_py)
    }

    /// Appends samples and brings the profile up to date.
    fn extend(&mut self, py: Python<'_>, samples: Vec<f64>) -> PyResult<()> {
        let state = &mut self.state;
        py.detach(|| state.extend(&samples)).map_err(to_py)
    }

    fn profile(&self) -> PyProfile {
        self.state.profile().into()
    }

    #[getter]
    fn completed_diagonals(&self) -> usize {
        self.state.completed_diagonals().len()
    }

    #[getter]
    fn total_diagonals(&self) -> usize {
        self.state.total_diagonals()
    }

    #[getter]
    fn is_complete(&self) -> bool {
        self.state.is_complete()
    }

    #[getter]
    fn series(&self) -> Vec<f64> {
        self.state.series().values().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "IncrementalProfile(n={}, m={}, distance={:?}, diagonals={}/{})",
            self.state.series().len(),
            self.state.config().m,
            self.state.config().kind.name(),
            self.state.completed_diagonals().len(),
            self.state.total_diagonals()
        )
    }
}

#[pymodule]
#[pyo3(name = "diagmp")]
fn diagmp_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyProfile>()?;
    m.add_class::<PyIncremental>()?;
    m.add_function(wrap_pyfunction!(matrix_profile, m)?)?;
    m.add_function(wrap_pyfunction!(brute_profile, m)?)?;
    m.add_function(wrap_pyfunction!(pair_distance, m)?)?;
    Ok(())
}
