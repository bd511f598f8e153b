//! Command-line front end for `diagmp`: CSV ingestion and export, profile
//! computation and a benchmark harness.

pub mod app;
pub mod bench;
pub mod io;
