//! Std companion to `curveprop-core`: FFT fast paths, rayon batch drivers,
//! the binary field format, report emission and the experiment runner
//! behind the `curveprop` CLI.

// `!(x > 0.0)` is how NaN gets rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod fast;
pub mod io;
pub mod parallel;
pub mod report;
pub mod runner;

pub use config::{parse_config, ConfigError, ExperimentConfig, ExperimentKind};
pub use runner::{execute, run, RunError, RunOutput};
