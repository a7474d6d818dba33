//! Case runner for the discontinuous strain damage model.
//!
//! Reads case configurations, builds the benchmark meshes, runs them and
//! writes `curve.csv`, VTK damage fields and `run_meta.json`. Also runs the
//! one-dimensional two-cycle demonstration and compares pairs of runs.

pub mod compare;
pub mod config;
pub mod demo;
pub mod error;
pub mod output;
pub mod run;

pub use compare::{compare_runs, CompareReport};
pub use config::{CaseConfig, MeshSource, Refinement, OUTPUT_DIR_ENV};
pub use error::{CliError, ErrorRecord};
pub use run::{run_case, run_case_in, RunMeta, RunOutcome};
