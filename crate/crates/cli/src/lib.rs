//! Configuration, orchestration and reporting for gaplab experiments.

use std::path::PathBuf;

pub mod config;
pub mod report;
pub mod run;

pub use config::{parse_config, ConfigError, Experiment, RunConfig};
pub use report::{report, Report};
pub use run::{run, RunOutcome};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] gaplab_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no manifest.json in {}", .0.display())]
    MissingManifest(PathBuf),
    #[error("{}: {reason}", path.display())]
    Corrupt { path: PathBuf, reason: String },
    #[error("{0}")]
    Usage(String),
}
