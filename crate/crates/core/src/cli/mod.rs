//! Config-driven experiment runner behind the `mmd-ext` binary.

pub mod config;
pub mod run;

pub use config::{BetaSpec, Experiment, ExperimentConfig, PsiSpec, Samples, SCHEMA_VERSION};
pub use run::{execute, exit_code, run_experiment, Pipeline, Run, RunReport, Section};

/// Environment variable overriding the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "MMD_EXT_OUTPUT_DIR";
