//! Pipeline orchestration for skeleton-based human activity discovery: run
//! configuration, the end-to-end experiment pipeline, report aggregation and
//! comparison, and SVG plotting. The `had` binary is a thin wrapper over
//! these modules.

pub mod config;
pub mod error;
pub mod pipeline;
pub mod report;
pub mod svg;

pub use config::{Algorithm, InputFormat, RunConfig};
pub use error::{Error, Result};
pub use pipeline::{prepare, run_experiments, run_pipeline, PreparedData};
pub use report::{compare, Comparison, ExperimentReport, RunRecord};
