//! Command-line harness and file formats for `contactnet-core`.
//!
//! * [`io`] — dataset, partition, curve and model-file formats.
//! * [`config`] — the JSON experiment configuration.
//! * [`harness`] — the end-to-end evaluation protocol.
//! * [`report`] — `report.json` and the other run artifacts.
//! * [`parallel`] — a thread pool whose output is independent of its size.

pub mod config;
pub mod error;
pub mod harness;
pub mod io;
pub mod parallel;
pub mod report;

pub use error::{CliError, Result};
