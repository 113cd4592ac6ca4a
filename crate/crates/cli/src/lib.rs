//! Declarative experiment runner: JSON configs in, CSV tables and a JSON manifest out.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{parse_config, ExperimentConfig, ExperimentKind, Extra};
pub use experiments::run;
pub use report::{emit_plotdata, Report};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(efetlab_core::Error),
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 2,
            CliError::Config(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<efetlab_core::Error> for CliError {
    fn from(e: efetlab_core::Error) -> Self {
        match e {
            efetlab_core::Error::Domain(msg) => CliError::Config(msg),
            other => CliError::Numeric(other),
        }
    }
}

/// Sizes the global rayon pool from `EFETLAB_THREADS` (unset, empty or 0 means automatic).
pub fn init_threads() -> Result<(), CliError> {
    let n = match std::env::var("EFETLAB_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("EFETLAB_THREADS must be a non-negative integer, got {v:?}")))?,
        _ => 0,
    };
    // a second initialisation (tests) keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
