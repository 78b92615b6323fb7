//! Instance files, experiment runner and reporting for `mubqp-core`.
//!
//! The `mubqp` binary wraps these modules:
//!
//! * [`format`]: read and write instance files.
//! * [`experiment`]: repeated runs per method, reference point, reports.
//! * [`summary`]: mean/std tables with Welch significance marks.
//! * [`eaf`]: attainment-surface CSVs for bi-objective instances.

pub mod eaf;
pub mod error;
pub mod experiment;
pub mod format;
pub mod summary;

pub use error::{BenchError, Result};
