//! Verification harness, file formats and experiment plumbing for `pwenv-core`.
//!
//! The `pwenv` binary wraps [`checks`] behind the `norms`, `verify`, `sweep`,
//! `equivalence` and `report` subcommands.

use std::path::Path;

pub mod catalog;
pub mod checks;
pub mod config;
pub mod direct;
pub mod formats;
pub mod norms_table;
pub mod report;

pub use pwenv_core;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("malformed document: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Numerics(#[from] pwenv_core::Error),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
