//! Experiment harness: configs, replications, CSV output, horizon sweeps and
//! the validation suite.

pub mod config;
pub mod experiment;
pub mod validate;

pub use config::{load_config, parse_config, Config, ExperimentConfig, LearnerSpec, SweepConfig};
pub use experiment::{
    aggregate, read_trace_series, run_experiment, run_replication, run_sweep, sweep,
    ExperimentSummary, RunOptions, SweepSummary,
};
pub use validate::{validate, Suite, ValidationReport};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "LOGDUELLI_OUT_DIR";
