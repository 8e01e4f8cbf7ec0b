//! Experiment orchestration around `teichflow-core`: configuration parsing,
//! CSV/JSON/SVG emission, seeded verification suites and the verbs exposed
//! by the `teichflow` binary.

pub mod config;
pub mod io;
pub mod run;
pub mod svg;
pub mod verify;

pub use config::{ConfigError, ExperimentConfig};
pub use run::{execute, CliError, Verb};
