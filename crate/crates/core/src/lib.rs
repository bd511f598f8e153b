//! Exact matrix profiles of univariate time series.
//!
//! Three distances are supported: plain Euclidean, p-norm (any real
//! `p >= 1`) and z-normalized Euclidean. Every engine walks the pair matrix
//! one diagonal at a time and updates each pair in O(1) from its predecessor,
//! for O(n (n - m)) time and O(n) memory overall. A running scan can be
//! observed or cancelled after any diagonal. A finished profile can be
//! extended with new samples without recomputing old pairs.
//!
//! ```
//! use diagmp::{matrix_profile, DistanceKind, ProfileConfig, TimeSeries};
//!
//! let ts = TimeSeries::new(vec![0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]).unwrap();
//! let mp = matrix_profile(&ts, &ProfileConfig::new(3, DistanceKind::Euclidean)).unwrap();
//! assert_eq!(mp.nn_index[0], Some(4));
//! assert!((mp.distances[1] - 3f64.sqrt()).abs() < 1e-12);
//! ```
//!
//! Positions are 0-based throughout.

pub mod aamp;
pub mod acamp;
pub mod config;
pub mod error;
pub mod oracle;
pub mod profile;
pub mod scan;
pub mod series;
pub mod synth;

pub use crate::aamp::{aamp, aamp_pnorm, extend_profile};
pub use crate::acamp::{acamp, DiagStats, ZnormVariant};
pub use crate::config::{validate_config, DistanceKind, ProfileConfig, Schedule};
pub use crate::error::{Error, Result};
pub use crate::oracle::brute_profile;
pub use crate::profile::MatrixProfile;
pub use crate::scan::{DiagonalCursor, EngineState, Flow, ProgressObserver};
pub use crate::series::TimeSeries;

/// Computes the exact profile with the engine matching `cfg.kind`; the
/// z-normalized distance uses the F-score comparison.
pub fn matrix_profile(ts: &TimeSeries, cfg: &ProfileConfig) -> Result<MatrixProfile> {
    let mut state = EngineState::new(ts.clone(), cfg)?;
    state.run(None)?;
    Ok(state.profile())
}
