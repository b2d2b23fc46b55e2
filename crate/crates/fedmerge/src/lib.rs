//! Experiment runner for federated patent retrieval: file formats, run
//! configuration, the end-to-end pipeline, reports and the CLI backend.

pub mod config;
pub mod error;
pub mod formats;
pub mod hashing;
pub mod pipeline;
pub mod report;

pub use config::{ExperimentConfig, Mode, Strategy};
pub use error::{Stage, StageError};
pub use pipeline::{run_experiment, write_outputs, Experiment, Federation, Inputs};
pub use report::{compare, Comparison, RunReport};
