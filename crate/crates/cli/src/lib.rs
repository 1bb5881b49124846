//! Experiment harness around `evofs-core`: repeated seeded runs with mean
//! and sample-deviation reporting, convergence logs, algorithm comparison
//! and the synthetic oracle dataset.

pub mod config;
pub mod experiment;
pub mod oracle;
pub mod output;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, Settings};
pub use experiment::{
    compare, comparison_rows, comparison_text, run_experiment, run_repeats, Aggregate,
    ExperimentReport, MeanStd, RunOutcome, RunRecord,
};
pub use oracle::{generate_oracle_dataset, OracleOptimum, OracleSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] evofs_core::Error),

    #[error("{0}")]
    Usage(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
