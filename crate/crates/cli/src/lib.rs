//! Experiment harness behind the `ccgsa` binary.
//!
//! An experiment is a flat configuration file (see [`ExperimentConfig`])
//! executed as `runs` independently seeded runs. Each run leaves
//! `run_<seed>.trace` and `run_<seed>.record` in the output directory; the
//! experiment adds `summary.tsv`, `convergence.tsv` and optionally
//! `groups.txt`.

pub mod config;
pub mod error;
pub mod experiment;
pub mod record;
pub mod report;

pub use config::{Algorithm, ExperimentConfig, Overrides, Problem, ProblemSpec};
pub use error::{HarnessError, Result};
pub use experiment::{execute_run, run_experiment, run_experiment_on, write_reports, ExperimentOutput};
pub use record::{load_runs, RunOutcome, RunRecord};
pub use report::{compare_table, convergence_table, summarize, Comparison, SummaryRow};
